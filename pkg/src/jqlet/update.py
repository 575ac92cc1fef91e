"""The two engines behind ``target |= expr``.

The default engine interleaves navigation of the target with applications of
the replacement filter, rebuilding arrays as it goes; it never materializes
paths, so a replacement that deletes or inserts elements cannot invalidate
positions computed earlier.  Identities like ``. |= f`` being ``f`` and
``.[] |= f`` being ``[.[] | f]`` hold by construction.

The legacy engine reproduces the classic path-collecting strategy for
comparison: it first lists the paths of every value the target yields
against the original input, then applies the replacement at each collected
path against the evolving value, taking only the replacement's first output
and deleting the element when there is none.  Paths that no longer resolve
are skipped.  The two engines differ observably when the replacement yields
zero or several outputs or when an earlier update shifts later positions.

The replacement filter is carried as a closure over the scope of the ``|=``
node itself, so variables bound inside the target are never visible to it.
"""

from __future__ import annotations

from typing import Callable, Iterator, List, Optional, Tuple

from .filters import (
    Bind, Comma, Filter, Identity, If, IndexF, IterAll, NativeCall, Pipe,
    Update, describe,
)
from .resolve import children as _node_children
from .values import (
    Arr, Err, Stream, fold_stream, is_int, share, splice_at, type_name,
)

# A replacement closure: value -> Stream of replacement outputs.
Sig = Callable[[object], Stream]
UpdateFn = Callable[[Sig, object, object], Stream]


def _not_a_path(mu: Filter) -> str:
    return f"not a path expression: {describe(mu)}"


def compile_update(mu: Filter, comp) -> UpdateFn:
    """Interleaved engine: recursion over the target's structure."""
    if isinstance(mu, NativeCall) and mu.name == "empty":
        return lambda sig, ctx, v: Stream.single(v)
    if isinstance(mu, Identity):
        return lambda sig, ctx, v: sig(v)
    if isinstance(mu, Pipe):
        uf = compile_update(mu.left, comp)
        ug = compile_update(mu.right, comp)

        def run_pipe(sig, ctx, v):
            def inner(x):  # update along g becomes the replacement for f
                return ug(sig, ctx, x)

            return uf(inner, ctx, v)

        return run_pipe
    if isinstance(mu, Comma):
        uf = compile_update(mu.left, comp)
        ug = compile_update(mu.right, comp)

        def run_comma(sig, ctx, v):
            def gen():
                for x in uf(sig, ctx, v):
                    if isinstance(x, Err):
                        yield x
                    else:
                        yield from ug(sig, ctx, x)

            return Stream(gen())

        return run_comma
    if isinstance(mu, Bind):
        sf = comp.compile(mu.src)
        ub = compile_update(mu.body, comp)

        def run_bind(sig, ctx, v):
            def gen():
                share(v)
                items = [share(x) for x in sf(ctx, v)]

                def step(x, state):
                    return ub(sig, (x, ctx), state)

                yield from fold_stream(False, items, step, Stream.single(v))

            return Stream(gen())

        return run_bind
    if isinstance(mu, If):
        cf = comp.compile(mu.cond)
        ut = compile_update(mu.then, comp)
        ue = compile_update(mu.orelse, comp)

        def run_if(sig, ctx, v):
            def gen():
                share(v)
                items = [share(x) for x in cf(ctx, v)]

                def step(x, state):
                    if x is True:
                        return ut(sig, ctx, state)
                    return ue(sig, ctx, state)

                yield from fold_stream(False, items, step, Stream.single(v))

            return Stream(gen())

        return run_if
    if isinstance(mu, IndexF):
        xf = comp.compile(mu.idx)

        def run_index(sig, ctx, v):
            def gen():
                share(v)
                # indices come from the original input; updates thread through
                items = [share(i) for i in xf(ctx, v)]

                def step(i, state):
                    return Stream.single(_update_at(state, i, sig))

                yield from fold_stream(False, items, step, Stream.single(v))

            return Stream(gen())

        return run_index
    if isinstance(mu, IterAll):

        def run_iter(sig, ctx, v):
            def gen():
                # same as evaluating [.[] | sig]
                if not isinstance(v, Arr):
                    yield Err(f"cannot iterate over {type_name(v)}")
                    return
                out = []
                for e in v.xs:
                    for r in sig(share(e)):
                        if isinstance(r, Err):
                            yield r
                            return
                        out.append(r)
                yield Arr(out)

            return Stream(gen(), 1, 1)

        return run_iter
    if isinstance(mu, NativeCall) and mu.name == "recurse" and len(mu.args) == 1:
        uf = compile_update(mu.args[0], comp)

        def run_recurse(sig, ctx, v):
            # replacement first on the node, then descend into the updated node
            def deeper(x):
                return run_recurse(sig, ctx, x)

            def gen():
                for s in sig(v):
                    if isinstance(s, Err):
                        yield s
                    else:
                        yield from uf(deeper, ctx, s)

            return Stream(gen())

        return run_recurse
    msg = _not_a_path(mu)
    return lambda sig, ctx, v: Stream.single(Err(msg))


def _update_at(state, i, sig: Sig):
    if not isinstance(state, Arr):
        return Err(f"cannot update index of {type_name(state)}")
    if not is_int(i):
        return Err(f"array index must be a number, got {type_name(i)}")
    n = len(state.xs)
    j = i if i >= 0 else n + i
    if not 0 <= j < n:
        return Err(f"index {i} out of range for array of length {n}")
    return splice_at(state, j, sig(share(state.xs[j])))


# ---------------------------------------------------------------------------
# Legacy engine: collect paths first, then update at each path.

_MISSING = object()

PathFn = Callable[[object, object], Iterator]  # (ctx, v) -> paths or Err


def compile_paths(mu: Filter, comp) -> PathFn:
    """Path collector: yields index tuples for every value ``mu`` returns
    against a fixed input, in output order."""
    if isinstance(mu, NativeCall) and mu.name == "empty":
        return lambda ctx, v: iter(())
    if isinstance(mu, Identity):
        return lambda ctx, v: iter(((),))
    if isinstance(mu, IterAll):

        def run_iter(ctx, v):
            if isinstance(v, Arr):
                return (((i,) for i in range(len(v.xs))))
            return iter((Err(f"cannot iterate over {type_name(v)}"),))

        return run_iter
    if isinstance(mu, IndexF):
        xf = comp.compile(mu.idx)

        def run_index(ctx, v):
            share(v)
            for i in xf(ctx, v):
                if isinstance(i, Err):
                    yield i
                elif not is_int(i):
                    yield Err(f"array index must be a number, got {type_name(i)}")
                elif not isinstance(v, Arr):
                    yield Err(f"cannot index {type_name(v)}")
                else:
                    # a path must resolve against the value it was built from;
                    # only later updates may invalidate it
                    n = len(v.xs)
                    j = i if i >= 0 else n + i
                    if 0 <= j < n:
                        yield (j,)
                    else:
                        yield Err(f"index {i} out of range for array of length {n}")

        return run_index
    if isinstance(mu, Pipe):
        pf = compile_paths(mu.left, comp)
        pg = compile_paths(mu.right, comp)

        def run_pipe(ctx, v):
            for p in pf(ctx, v):
                if isinstance(p, Err):
                    yield p
                    continue
                sub = _value_at(v, p)
                if sub is _MISSING:
                    yield Err("path does not exist")
                    continue
                if isinstance(sub, Err):
                    yield sub
                    continue
                for q in pg(ctx, sub):
                    yield q if isinstance(q, Err) else p + q

        return run_pipe
    if isinstance(mu, Comma):
        pf = compile_paths(mu.left, comp)
        pg = compile_paths(mu.right, comp)

        def run_comma(ctx, v):
            share(v)
            yield from pf(ctx, v)
            yield from pg(ctx, v)

        return run_comma
    if isinstance(mu, Bind):
        sf = comp.compile(mu.src)
        pb = compile_paths(mu.body, comp)

        def run_bind(ctx, v):
            share(v)
            for x in sf(ctx, v):
                if isinstance(x, Err):
                    yield x
                else:
                    yield from pb((share(x), ctx), v)

        return run_bind
    if isinstance(mu, If):
        cf = comp.compile(mu.cond)
        pt = compile_paths(mu.then, comp)
        pe = compile_paths(mu.orelse, comp)

        def run_if(ctx, v):
            share(v)
            for x in cf(ctx, v):
                if isinstance(x, Err):
                    yield x
                elif x is True:
                    yield from pt(ctx, v)
                else:
                    yield from pe(ctx, v)

        return run_if
    if isinstance(mu, NativeCall) and mu.name == "recurse" and len(mu.args) == 1:
        pf = compile_paths(mu.args[0], comp)

        def run_recurse(ctx, v):
            yield ()
            for p in pf(ctx, v):
                if isinstance(p, Err):
                    yield p
                    continue
                sub = _value_at(v, p)
                if sub is _MISSING or isinstance(sub, Err):
                    yield Err("path does not exist")
                    continue
                for q in run_recurse(ctx, sub):
                    yield q if isinstance(q, Err) else p + q

        return run_recurse
    msg = _not_a_path(mu)
    return lambda ctx, v: iter((Err(msg),))


def compile_update_legacy(mu: Filter, comp) -> UpdateFn:
    pathf = compile_paths(mu, comp)

    def run(sig, ctx, v):
        def gen():
            share(v)
            paths: List[tuple] = []
            for p in pathf(ctx, v):
                if isinstance(p, Err):
                    yield p
                    return
                paths.append(p)
            state = v
            for p in paths:
                old = _value_at(state, p)
                if old is _MISSING:
                    continue  # the path went stale; skip it silently
                if isinstance(old, Err):
                    yield old
                    return
                first = next(iter(sig(share(old))), _MISSING)
                if first is _MISSING:
                    state = _delete_at(state, p)
                elif isinstance(first, Err):
                    yield first
                    return
                else:
                    state = _set_at(state, p, first)
                if isinstance(state, Err):
                    yield state
                    return
            yield state

        return Stream(gen(), 1, 1)

    return run


def _value_at(v, path: tuple):
    """Navigate a path; _MISSING for vanished indices, Err on type mismatch."""
    cur = v
    for i in path:
        if isinstance(cur, Arr):
            if 0 <= i < len(cur.xs):
                cur = cur.xs[i]
            else:
                return _MISSING
        else:
            return Err(f"stale path: cannot index {type_name(cur)}")
    return cur


def _set_at(v, path: tuple, val):
    if not path:
        return val
    i = path[0]
    xs = list(v.xs)
    xs[i] = _set_at(xs[i], path[1:], val)
    return Arr(xs)


def _delete_at(v, path: tuple):
    if not path:
        return None  # deleting the whole input leaves null behind
    if len(path) == 1:
        xs = list(v.xs)
        del xs[path[0]]
        return Arr(xs)
    i = path[0]
    xs = list(v.xs)
    xs[i] = _delete_at(xs[i], path[1:])
    if isinstance(xs[i], Err):
        return xs[i]
    return Arr(xs)


# ---------------------------------------------------------------------------
# Static diagnosis: path-ness is known after inlining, so impossible targets
# can be reported at compile time.  Evaluation still produces the error token
# at run time; these are warnings, not rejections.


def path_warnings(f: Filter) -> List[str]:
    out: List[str] = []
    _warn_walk(f, out)
    return out


def _warn_walk(f: Filter, out: List[str]):
    if isinstance(f, Update):
        _warn_target(f.target, out)
        _warn_walk(f.expr, out)
        return
    for child in _node_children(f):
        _warn_walk(child, out)


def _warn_target(mu: Filter, out: List[str]):
    if isinstance(mu, (Identity, IterAll)):
        return
    if isinstance(mu, NativeCall) and (mu.name, len(mu.args)) in (("empty", 0), ("recurse", 1)):
        if mu.args:
            _warn_target(mu.args[0], out)
        return
    if isinstance(mu, IndexF):
        _warn_walk(mu.idx, out)
        return
    if isinstance(mu, (Pipe, Comma)):
        _warn_target(mu.left, out)
        _warn_target(mu.right, out)
        return
    if isinstance(mu, Bind):
        _warn_walk(mu.src, out)
        _warn_target(mu.body, out)
        return
    if isinstance(mu, If):
        _warn_walk(mu.cond, out)
        _warn_target(mu.then, out)
        _warn_target(mu.orelse, out)
        return
    out.append(f"left side of |= is not a path expression: {describe(mu)}")
