"""Stream evaluator.

A resolved filter is compiled once into a tree of Python closures; each
closure takes a context (a linked list of bound values, innermost first) and
an input value and returns a lazy :class:`~jqlet.values.Stream`.  Compiled
programs are immutable and may be shared across threads; each returned
stream has a single consumer.

Evaluation never raises for data reasons: errors are stream elements, and a
filter applied to an error input yields exactly that error.

Binary value operators evaluate strictly on the right: all right-operand
outputs are buffered before the left operand runs, and the observable order
stays left-major.  Consequence, by design: an infinite right operand
diverges even under ``limit``; pipe the right side through a variable
binding when that matters.

Cloning discipline: the input value of a closure is owned by that closure
unless it was marked shared.  Wherever a value becomes reachable twice
(bound into a context, buffered for reuse, fed to two subfilters, emitted
while the evaluator keeps using it) it is marked shared first, and a static
"reads its input" analysis skips the mark when a subfilter provably ignores
the input.  This is what lets fold states grow by in-place concatenation.
"""

from __future__ import annotations

from typing import Callable, Iterator, List, Optional, Tuple

from . import update as update_mod
from .filters import (
    And, Bind, Call, Cartesian, Collect, Comma, Definition, Filter, Fold,
    FOREACH, Identity, If, IndexF, IntLit, IterAll, NativeCall, Or, Pipe,
    Try, Update, Var, VarRef,
)
from .prelude import NATIVES, NATIVE_SIGS, PRELUDE_SOURCE
from .resolve import ResolveError, children as _node_children, resolve_program
from .syntax import parse_defs, parse_program
from .values import (
    Arr, Err, Stream, cartesian, elems, fold_stream, index, share,
    stream_to_array,
)

# A context is None or a (value, parent) pair; lookup walks binder distance.
Ctx = Optional[tuple]
RunFn = Callable[[Ctx, object], Stream]


class Compiler:
    """Compiles resolved filters to closures; ``engine`` picks the update
    strategy ("new" interleaved or "legacy" path-collecting)."""

    def __init__(self, engine: str = "new"):
        if engine not in ("new", "legacy"):
            raise ValueError(f"unknown update engine {engine!r}")
        self.engine = engine
        self._reads_memo: dict = {}
        self._touch_memo: dict = {}

    # -- static input-usage analysis -------------------------------------
    #
    # reads_input: could evaluating f observe its input at all?  Needed where
    # a value is handed out while f still has reading to do (recurse).
    #
    # touches_input: could evaluating f mutate its input, or emit or retain
    # an alias of the input itself?  Element reads do not count: retrieved
    # elements are marked shared at the moment they are handed out, and a
    # spine that is only read stays valid.  This is the predicate that
    # decides whether a value must be shared before it is fed to a second
    # subfilter; reads ⊇ touches.

    def reads_input(self, f: Filter) -> bool:
        key = id(f)
        got = self._reads_memo.get(key)
        if got is None:
            got = self._reads_memo[key] = self._reads(f)
        return got

    def _reads(self, f: Filter) -> bool:
        if isinstance(f, (IntLit, VarRef)):
            return False
        if isinstance(f, (Identity, IterAll, IndexF, Update)):
            return True
        if isinstance(f, NativeCall):
            nat = NATIVES[(f.name, len(f.args))]
            if nat.reads == "yes":
                return True
            if nat.reads == "args":
                return any(self.reads_input(a) for a in f.args)
            return False
        if isinstance(f, Fold):
            # the step runs on fold states, never on this node's input
            return self.reads_input(f.src) or self.reads_input(f.init)
        return any(self.reads_input(c) for c in _node_children(f))

    def touches_input(self, f: Filter) -> bool:
        key = id(f)
        got = self._touch_memo.get(key)
        if got is None:
            got = self._touch_memo[key] = self._touches(f)
        return got

    def _touches(self, f: Filter) -> bool:
        if isinstance(f, (IntLit, VarRef, IterAll)):
            return False
        if isinstance(f, Identity):
            return True  # yields the input itself
        if isinstance(f, Update):
            return True  # may yield the input or arrays reusing its spine
        if isinstance(f, IndexF):
            return self.touches_input(f.idx)
        if isinstance(f, (Collect, Try)):
            return self.touches_input(f.body)
        if isinstance(f, Pipe):
            # the right side never sees this node's input directly
            return self.touches_input(f.left)
        if isinstance(f, (Comma, And, Or)):
            return self.touches_input(f.left) or self.touches_input(f.right)
        if isinstance(f, Cartesian):
            return self.touches_input(f.left) or self.touches_input(f.right)
        if isinstance(f, If):
            return (
                self.touches_input(f.cond)
                or self.touches_input(f.then)
                or self.touches_input(f.orelse)
            )
        if isinstance(f, Bind):
            return self.touches_input(f.src) or self.touches_input(f.body)
        if isinstance(f, Fold):
            return self.touches_input(f.src) or self.touches_input(f.init)
        if isinstance(f, NativeCall):
            nat = NATIVES[(f.name, len(f.args))]
            if nat.touches == "yes":
                return True
            if nat.touches == "args":
                return any(self.touches_input(a) for a in f.args)
            return False
        raise TypeError(f"cannot analyse {f!r}")

    # -- compilation ------------------------------------------------------

    def compile(self, f: Filter) -> RunFn:
        if isinstance(f, IntLit):
            n = f.value
            return lambda ctx, v: Stream.single(n)
        if isinstance(f, Identity):
            return lambda ctx, v: Stream.single(v)
        if isinstance(f, VarRef):
            depth = f.depth
            def var_run(ctx, v):
                e = ctx
                for _ in range(depth):
                    e = e[1]
                return Stream.single(e[0])
            return var_run
        if isinstance(f, IterAll):
            return lambda ctx, v: elems(v)
        if isinstance(f, IndexF):
            return self._compile_index(f)
        if isinstance(f, Collect):
            return self._compile_collect(f)
        if isinstance(f, Try):
            return self._compile_try(f)
        if isinstance(f, Pipe):
            return self._compile_pipe(f)
        if isinstance(f, Comma):
            return self._compile_comma(f)
        if isinstance(f, Cartesian):
            return self._compile_cartesian(f)
        if isinstance(f, And):
            return self._compile_andor(f, False)
        if isinstance(f, Or):
            return self._compile_andor(f, True)
        if isinstance(f, If):
            return self._compile_if(f)
        if isinstance(f, Bind):
            return self._compile_bind(f)
        if isinstance(f, Fold):
            return self._compile_fold(f)
        if isinstance(f, Update):
            return self._compile_update(f)
        if isinstance(f, NativeCall):
            return self._compile_native(f)
        if isinstance(f, (Var, Call)):
            raise ResolveError(f"unresolved filter node: {f!r}")
        raise TypeError(f"cannot compile {f!r}")

    def _compile_index(self, f: IndexF) -> RunFn:
        xf = self.compile(f.idx)
        idx_touches = self.touches_input(f.idx)

        def run(ctx, v):
            if idx_touches:
                share(v)
            istream = xf(ctx, v)

            def gen():
                for i in istream:
                    yield i if isinstance(i, Err) else index(v, i)

            return Stream(gen(), istream.lo, istream.hi)

        return run

    def _compile_collect(self, f: Collect) -> RunFn:
        bf = self.compile(f.body)

        def run(ctx, v):
            def gen():
                yield stream_to_array(bf(ctx, v))

            return Stream(gen(), 1, 1)

        return run

    def _compile_try(self, f: Try) -> RunFn:
        bf = self.compile(f.body)

        def run(ctx, v):
            bs = bf(ctx, v)

            def gen():
                for x in bs:
                    if not isinstance(x, Err):
                        yield x

            return Stream(gen(), 0, bs.hi)

        return run

    def _compile_pipe(self, f: Pipe) -> RunFn:
        lf, rf = self.compile(f.left), self.compile(f.right)

        def run(ctx, v):
            ls = lf(ctx, v)

            def gen():
                for x in ls:
                    if isinstance(x, Err):
                        yield x
                    else:
                        yield from rf(ctx, x)

            return Stream(gen(), 0, 0 if ls.hi == 0 else None)

        return run

    def _compile_comma(self, f: Comma) -> RunFn:
        lf, rf = self.compile(f.left), self.compile(f.right)
        left_touches = self.touches_input(f.left)

        def run(ctx, v):
            if left_touches:
                share(v)  # the right side must still see the original
            ls = lf(ctx, v)
            rs = rf(ctx, v)

            def gen():
                yield from ls
                yield from rs

            hi = None if ls.hi is None or rs.hi is None else ls.hi + rs.hi
            return Stream(gen(), ls.lo + rs.lo, hi)

        return run

    def _compile_cartesian(self, f: Cartesian) -> RunFn:
        op = f.op
        lf, rf = self.compile(f.left), self.compile(f.right)
        right_touches = self.touches_input(f.right)

        def run(ctx, v):
            if right_touches:
                share(v)
            rs = rf(ctx, v)
            ls = lf(ctx, v)

            def gen():
                buf = [share(y) for y in rs]  # strict right side, reused per x
                single = len(buf) == 1
                for x in ls:
                    bad = isinstance(x, Err)
                    if not single and not bad:
                        share(x)
                    for y in buf:
                        if bad:
                            yield x  # one error element per pair, left first
                        elif isinstance(y, Err):
                            yield y
                        else:
                            yield cartesian(op, x, y)

            hi = None if ls.hi is None or rs.hi is None else ls.hi * rs.hi
            return Stream(gen(), ls.lo * rs.lo, hi)

        return run

    def _compile_andor(self, f, is_or: bool) -> RunFn:
        lf, rf = self.compile(f.left), self.compile(f.right)
        needs_share = self.touches_input(f.right)
        pivot = is_or  # `or` short-circuits on true, `and` on false

        def run(ctx, v):
            if needs_share:
                share(v)
            ls = lf(ctx, v)

            def gen():
                for x in ls:
                    if isinstance(x, Err):
                        yield x
                    elif isinstance(x, bool) and x is pivot:
                        yield pivot
                    else:
                        yield from rf(ctx, v)

            return Stream(gen())

        return run

    def _compile_if(self, f: If) -> RunFn:
        cf, tf, ef = self.compile(f.cond), self.compile(f.then), self.compile(f.orelse)
        # the condition alone may own the input; the branches run against it
        # while the condition stream is still live
        needs_share = self.touches_input(f.then) or self.touches_input(f.orelse)

        def run(ctx, v):
            if needs_share:
                share(v)
            cs = cf(ctx, v)

            def gen():
                for x in cs:
                    if isinstance(x, Err):
                        yield x
                    elif x is True:  # only the exact value true selects then
                        yield from tf(ctx, v)
                    else:
                        yield from ef(ctx, v)

            return Stream(gen())

        return run

    def _compile_bind(self, f: Bind) -> RunFn:
        sf, bf = self.compile(f.src), self.compile(f.body)
        src_touches = self.touches_input(f.src)
        body_touches = self.touches_input(f.body)

        def run(ctx, v):
            ss = sf(ctx, v)
            # With exactly one bound value from a source that leaves the
            # input alone, the body may take over the original value.
            if src_touches or (body_touches and not (ss.lo == 1 and ss.hi == 1)):
                share(v)

            def gen():
                # an error binds like a value and resurfaces wherever the
                # variable is read; this keeps `f?` equal to `f as $x | $x?`
                for x in ss:
                    yield from bf((share(x), ctx), v)

            return Stream(gen())

        return run

    def _compile_fold(self, f: Fold) -> RunFn:
        foreach = f.kind == FOREACH
        sf, inf, stf = self.compile(f.src), self.compile(f.init), self.compile(f.step)
        # sources drain strictly before the seeds run, so only a source that
        # mutates or captures the input endangers the seed filter's view
        needs_share = self.touches_input(f.src)

        def run(ctx, v):
            if needs_share:
                share(v)

            def gen():
                items = [share(x) for x in sf(ctx, v)]

                def step(x, state):
                    return stf((x, ctx), state)

                yield from fold_stream(foreach, items, step, inf(ctx, v))

            return Stream(gen())

        return run

    def _compile_update(self, f: Update) -> RunFn:
        sigma_fn = self.compile(f.expr)
        if self.engine == "legacy":
            target_fn = update_mod.compile_update_legacy(f.target, self)
        else:
            target_fn = update_mod.compile_update(f.target, self)

        def run(ctx, v):
            def sig(x):
                return sigma_fn(ctx, x)  # the replacement runs in this scope

            return target_fn(sig, ctx, v)

        return run

    def _compile_native(self, f: NativeCall) -> RunFn:
        nat = NATIVES[(f.name, len(f.args))]
        argfns = tuple(self.compile(a) for a in f.args)
        arg_uses = tuple(self.reads_input(a) for a in f.args)
        arg_touches = tuple(self.touches_input(a) for a in f.args)
        native_run = nat.run
        if nat.share_args and any(arg_touches):
            def run(ctx, v):
                share(v)
                return native_run(argfns, arg_uses, ctx, v)
            return run
        return lambda ctx, v: native_run(argfns, arg_uses, ctx, v)


class Program:
    """A compiled filter ready to run against input values."""

    def __init__(self, fn: RunFn, warnings: Tuple[str, ...] = ()):
        self._fn = fn
        self.warnings = warnings

    def run(self, v) -> Iterator:
        """Evaluate on one input; yields values and error tokens in order."""
        if isinstance(v, Err):
            return iter((v,))
        share(v)  # the caller keeps its reference
        return iter(self._fn(None, v))

    def run_list(self, v) -> list:
        return list(self.run(v))


def eval_filter(f: Filter, ctx: Ctx, v, engine: str = "new") -> Stream:
    """Evaluate a resolved filter directly (library and test entry point)."""
    if isinstance(v, Err):
        return Stream.single(v)
    share(v)
    return Compiler(engine).compile(f)(ctx, v)


def compile_program(
    source: str,
    *,
    defs_source: str = None,
    use_prelude: bool = True,
    engine: str = "new",
    pipe_length: bool = False,
) -> Program:
    """Parse, resolve, and compile a program.

    ``source`` may start with ``def name: body;`` definitions.  Extra
    definitions can be supplied via ``defs_source``; they are loaded after
    the prelude and before the program's own definitions.  ``pipe_length``
    post-composes the filter with ``length``.
    """
    defs: List[Definition] = []
    if use_prelude:
        defs.extend(parse_defs(PRELUDE_SOURCE))
    if defs_source:
        defs.extend(parse_defs(defs_source))
    own_defs, filt = parse_program(source)
    defs.extend(own_defs)
    if pipe_length:
        filt = Pipe(filt, Call("length"))
    resolved = resolve_program(filt, defs, NATIVE_SIGS)
    warnings = tuple(update_mod.path_warnings(resolved))
    fn = Compiler(engine).compile(resolved)
    return Program(fn, warnings)
