"""Substitution, call inlining, and variable resolution.

Defined filters are expanded at compile time; a definition may only call
definitions that appear before it, so recursion is rejected by construction.
Substituting argument filters into a body renames every variable the body
binds to a fresh name first, so an argument can never be captured by a
binder inside the definition.
"""

from __future__ import annotations

from typing import Dict, Iterable, List, Sequence, Set, Tuple

from .filters import (
    And, Bind, Call, Cartesian, Collect, Comma, Definition, Filter, Fold,
    Identity, If, IndexF, IntLit, IterAll, NativeCall, Or, Pipe, Try, Update,
    Var, VarRef,
)


class ResolveError(Exception):
    pass


class FreshNames:
    """Fresh-name source for one compilation session.

    Names are ``hint~k`` with a per-hint counter; ``~`` cannot appear in
    lexable source, so a fresh name never collides with a written one.
    """

    def __init__(self):
        self._counts: Dict[str, int] = {}

    def fresh(self, hint: str) -> str:
        base = hint.split("~", 1)[0]
        n = self._counts.get(base, 0) + 1
        self._counts[base] = n
        return f"{base}~{n}"


def substitute(phi: Filter, sigma: Dict[str, Filter], fresh: FreshNames) -> Filter:
    """Apply ``sigma`` to ``phi`` while renaming every binder in ``phi``.

    Keys of ``sigma`` are either ``$name`` for variables or ``name`` for
    zero-argument calls (definition parameters).  Unmapped names pass
    through unchanged.
    """
    if isinstance(phi, (Identity, IntLit, IterAll, VarRef)):
        return phi
    if isinstance(phi, Var):
        return sigma.get("$" + phi.name, phi)
    if isinstance(phi, Call):
        if not phi.args:
            return sigma.get(phi.name, phi)
        return Call(phi.name, tuple(substitute(a, sigma, fresh) for a in phi.args))
    if isinstance(phi, NativeCall):
        return NativeCall(phi.name, tuple(substitute(a, sigma, fresh) for a in phi.args))
    if isinstance(phi, IndexF):
        return IndexF(substitute(phi.idx, sigma, fresh))
    if isinstance(phi, Collect):
        return Collect(substitute(phi.body, sigma, fresh))
    if isinstance(phi, Try):
        return Try(substitute(phi.body, sigma, fresh))
    if isinstance(phi, Pipe):
        return Pipe(substitute(phi.left, sigma, fresh), substitute(phi.right, sigma, fresh))
    if isinstance(phi, Comma):
        return Comma(substitute(phi.left, sigma, fresh), substitute(phi.right, sigma, fresh))
    if isinstance(phi, Update):
        return Update(substitute(phi.target, sigma, fresh), substitute(phi.expr, sigma, fresh))
    if isinstance(phi, And):
        return And(substitute(phi.left, sigma, fresh), substitute(phi.right, sigma, fresh))
    if isinstance(phi, Or):
        return Or(substitute(phi.left, sigma, fresh), substitute(phi.right, sigma, fresh))
    if isinstance(phi, Cartesian):
        return Cartesian(
            phi.op, substitute(phi.left, sigma, fresh), substitute(phi.right, sigma, fresh)
        )
    if isinstance(phi, If):
        return If(
            substitute(phi.cond, sigma, fresh),
            substitute(phi.then, sigma, fresh),
            substitute(phi.orelse, sigma, fresh),
        )
    if isinstance(phi, Bind):
        renamed = fresh.fresh(phi.var)
        inner = dict(sigma)
        inner["$" + phi.var] = Var(renamed)
        return Bind(substitute(phi.src, sigma, fresh), renamed, substitute(phi.body, inner, fresh))
    if isinstance(phi, Fold):
        renamed = fresh.fresh(phi.var)
        inner = dict(sigma)
        inner["$" + phi.var] = Var(renamed)
        return Fold(
            phi.kind,
            substitute(phi.src, sigma, fresh),
            renamed,
            substitute(phi.init, sigma, fresh),  # the seed cannot see the fold variable
            substitute(phi.step, inner, fresh),
        )
    raise TypeError(f"cannot substitute into {phi!r}")


def inline_calls(
    f: Filter,
    defs: Sequence[Definition],
    natives: Iterable[Tuple[str, int]],
    fresh: FreshNames = None,
) -> Filter:
    """Expand every call to a defined filter; keep native calls as tagged
    nodes with inlined arguments."""
    fresh = fresh or FreshNames()
    native_sigs = set(natives)
    env: Dict[Tuple[str, int], Tuple[Tuple[str, ...], Filter]] = {}
    for d in defs:
        key = (d.name, d.arity)
        if key in env:
            raise ResolveError(f"duplicate definition of {d.name}/{d.arity}")
        env[key] = (d.params, _inline(d.body, env, native_sigs, set(d.params), d.name, fresh))
    return _inline(f, env, native_sigs, set(), None, fresh)


def _inline(f, env, natives, params, current, fresh):
    if isinstance(f, (Identity, IntLit, IterAll, Var, VarRef)):
        return f
    if isinstance(f, (Call, NativeCall)):
        args = tuple(_inline(a, env, natives, params, current, fresh) for a in f.args)
        if isinstance(f, NativeCall):
            return NativeCall(f.name, args)
        key = (f.name, len(args))
        if not args and f.name in params:
            return Call(f.name)  # parameter reference, replaced on expansion
        entry = env.get(key)
        if entry is not None:
            def_params, body = entry
            binding = {p: a for p, a in zip(def_params, args)}
            return substitute(body, binding, fresh)
        if key in natives:
            return NativeCall(f.name, args)
        if f.name == current:
            raise ResolveError(f"recursive filter definitions are not supported: {f.name}")
        raise ResolveError(
            f"undefined filter {f.name}/{len(args)} (definitions may only call earlier ones)"
        )
    if isinstance(f, IndexF):
        return IndexF(_inline(f.idx, env, natives, params, current, fresh))
    if isinstance(f, Collect):
        return Collect(_inline(f.body, env, natives, params, current, fresh))
    if isinstance(f, Try):
        return Try(_inline(f.body, env, natives, params, current, fresh))
    if isinstance(f, Pipe):
        return Pipe(
            _inline(f.left, env, natives, params, current, fresh),
            _inline(f.right, env, natives, params, current, fresh),
        )
    if isinstance(f, Comma):
        return Comma(
            _inline(f.left, env, natives, params, current, fresh),
            _inline(f.right, env, natives, params, current, fresh),
        )
    if isinstance(f, Update):
        return Update(
            _inline(f.target, env, natives, params, current, fresh),
            _inline(f.expr, env, natives, params, current, fresh),
        )
    if isinstance(f, And):
        return And(
            _inline(f.left, env, natives, params, current, fresh),
            _inline(f.right, env, natives, params, current, fresh),
        )
    if isinstance(f, Or):
        return Or(
            _inline(f.left, env, natives, params, current, fresh),
            _inline(f.right, env, natives, params, current, fresh),
        )
    if isinstance(f, Cartesian):
        return Cartesian(
            f.op,
            _inline(f.left, env, natives, params, current, fresh),
            _inline(f.right, env, natives, params, current, fresh),
        )
    if isinstance(f, If):
        return If(
            _inline(f.cond, env, natives, params, current, fresh),
            _inline(f.then, env, natives, params, current, fresh),
            _inline(f.orelse, env, natives, params, current, fresh),
        )
    if isinstance(f, Bind):
        return Bind(
            _inline(f.src, env, natives, params, current, fresh),
            f.var,
            _inline(f.body, env, natives, params, current, fresh),
        )
    if isinstance(f, Fold):
        return Fold(
            f.kind,
            _inline(f.src, env, natives, params, current, fresh),
            f.var,
            _inline(f.init, env, natives, params, current, fresh),
            _inline(f.step, env, natives, params, current, fresh),
        )
    raise TypeError(f"cannot inline {f!r}")


def resolve_variables(f: Filter, binders: Tuple[str, ...] = ()) -> Filter:
    """Rewrite every variable into its binder distance; error when unbound."""
    if isinstance(f, (Identity, IntLit, IterAll)):
        return f
    if isinstance(f, VarRef):
        return f
    if isinstance(f, Var):
        try:
            return VarRef(binders.index(f.name))
        except ValueError:
            raise ResolveError(f"unbound variable ${f.name}") from None
    if isinstance(f, NativeCall):
        return NativeCall(f.name, tuple(resolve_variables(a, binders) for a in f.args))
    if isinstance(f, Call):
        raise ResolveError(f"call survived inlining: {f.name}")
    if isinstance(f, IndexF):
        return IndexF(resolve_variables(f.idx, binders))
    if isinstance(f, Collect):
        return Collect(resolve_variables(f.body, binders))
    if isinstance(f, Try):
        return Try(resolve_variables(f.body, binders))
    if isinstance(f, Pipe):
        return Pipe(resolve_variables(f.left, binders), resolve_variables(f.right, binders))
    if isinstance(f, Comma):
        return Comma(resolve_variables(f.left, binders), resolve_variables(f.right, binders))
    if isinstance(f, Update):
        return Update(resolve_variables(f.target, binders), resolve_variables(f.expr, binders))
    if isinstance(f, And):
        return And(resolve_variables(f.left, binders), resolve_variables(f.right, binders))
    if isinstance(f, Or):
        return Or(resolve_variables(f.left, binders), resolve_variables(f.right, binders))
    if isinstance(f, Cartesian):
        return Cartesian(
            f.op, resolve_variables(f.left, binders), resolve_variables(f.right, binders)
        )
    if isinstance(f, If):
        return If(
            resolve_variables(f.cond, binders),
            resolve_variables(f.then, binders),
            resolve_variables(f.orelse, binders),
        )
    if isinstance(f, Bind):
        return Bind(
            resolve_variables(f.src, binders),
            f.var,
            resolve_variables(f.body, (f.var,) + binders),
        )
    if isinstance(f, Fold):
        return Fold(
            f.kind,
            resolve_variables(f.src, binders),
            f.var,
            resolve_variables(f.init, binders),  # seed is outside the fold variable's scope
            resolve_variables(f.step, (f.var,) + binders),
        )
    raise TypeError(f"cannot resolve {f!r}")


def resolve_program(
    f: Filter, defs: Sequence[Definition], natives: Iterable[Tuple[str, int]]
) -> Filter:
    """Inline all defined calls and resolve variables; the result is closed."""
    return resolve_variables(inline_calls(f, defs, natives))


def free_variables(f: Filter, bound: frozenset = frozenset()) -> Set[str]:
    """Free variable names of a named-form filter (test and tooling aid)."""
    if isinstance(f, Var):
        return set() if f.name in bound else {f.name}
    if isinstance(f, Bind):
        return free_variables(f.src, bound) | free_variables(f.body, bound | {f.var})
    if isinstance(f, Fold):
        return (
            free_variables(f.src, bound)
            | free_variables(f.init, bound)
            | free_variables(f.step, bound | {f.var})
        )
    out: Set[str] = set()
    for child in children(f):
        out |= free_variables(child, bound)
    return out


def bound_variables(f: Filter) -> Set[str]:
    out: Set[str] = set()
    if isinstance(f, (Bind, Fold)):
        out.add(f.var)
    for child in children(f):
        out |= bound_variables(child)
    return out


def children(f: Filter) -> Tuple[Filter, ...]:
    if isinstance(f, (IntLit, Var, VarRef, Identity, IterAll)):
        return ()
    if isinstance(f, IndexF):
        return (f.idx,)
    if isinstance(f, (Collect, Try)):
        return (f.body,)
    if isinstance(f, (Pipe, Comma, And, Or)):
        return (f.left, f.right)
    if isinstance(f, Update):
        return (f.target, f.expr)
    if isinstance(f, Cartesian):
        return (f.left, f.right)
    if isinstance(f, If):
        return (f.cond, f.then, f.orelse)
    if isinstance(f, Bind):
        return (f.src, f.body)
    if isinstance(f, Fold):
        return (f.src, f.init, f.step)
    if isinstance(f, (Call, NativeCall)):
        return tuple(f.args)
    raise TypeError(f"unknown node {f!r}")
