"""Built-in filters.

Filters that need unbounded recursion or laziness (``recurse``, ``limit``,
``range``) are implemented natively; everything expressible without
recursion ships as source in :data:`PRELUDE_SOURCE` and is parsed in front
of user programs.  Natives reject wrong input or argument types with an
error token rather than coercing.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cmp_to_key
from typing import Callable, Dict, Tuple

from .values import (
    Arr, Err, Stream, compare, is_int, render_value, share, type_name,
)

PRELUDE_SOURCE = """\
def true: 0 == 0;
def false: 0 != 0;
def not: if . then false else true end;
def select(f): if f then . else empty end;
def add: reduce .[] as $x (null; . + $x);
def length: reduce .[] as $x (0; . + 1);
def last(f): reduce f as $x (null; $x);
def nth(n; f): last(limit(n + 1; f));
def scalars: if isarr then empty else . end;
def flatten: [recurse(if isarr then .[] else empty end) | scalars];
def trees: recurse([., .]);
"""


@dataclass(frozen=True)
class Native:
    """A natively implemented filter.

    ``run(argfns, arg_uses, ctx, v)`` returns the output stream; ``argfns``
    are the compiled argument filters and ``arg_uses`` says which of them
    read their input value.

    ``reads`` and ``touches`` feed the evaluator's static input-usage
    analysis ("no", "yes", or "args" for: exactly when some argument does).
    A native touches its input when it may mutate it or emit an alias of
    it; it merely reads it when it only inspects it.  ``share_args`` marks
    natives that feed the input value to more than one argument evaluation,
    so the input must be shared first when any argument touches it.
    """

    name: str
    arity: int
    run: Callable
    reads: str = "no"
    touches: str = "no"
    share_args: bool = False


def _empty_run(argfns, arg_uses, ctx, v):
    return Stream.empty()


def _null_run(argfns, arg_uses, ctx, v):
    return Stream.single(None)


def _isarr_run(argfns, arg_uses, ctx, v):
    return Stream.single(isinstance(v, Arr))


def _range_run(argfns, arg_uses, ctx, v):
    (nf,) = argfns

    def gen():
        for n in nf(ctx, v):
            if isinstance(n, Err):
                yield n
            elif not is_int(n):
                yield Err(f"range: expected a number, got {type_name(n)}")
            else:
                yield from range(n)

    return Stream(gen())


def _reverse_run(argfns, arg_uses, ctx, v):
    if not isinstance(v, Arr):
        return Stream.single(Err(f"cannot reverse {type_name(v)}"))
    if v.shared:
        return Stream.single(Arr(v.xs[::-1]))
    v.xs.reverse()
    return Stream.single(v)


def _sort_run(argfns, arg_uses, ctx, v):
    if not isinstance(v, Arr):
        return Stream.single(Err(f"cannot sort {type_name(v)}"))
    xs = v.xs if not v.shared else list(v.xs)
    if all(is_int(x) for x in xs):
        xs.sort()
    else:
        xs.sort(key=cmp_to_key(compare))
    return Stream.single(v if xs is v.xs else Arr(xs))


def _recurse_run(argfns, arg_uses, ctx, v):
    (ff,) = argfns
    f_reads = arg_uses[0]

    def walk(x):
        if f_reads:
            share(x)  # the consumer gets x while f still needs to read it
        yield x
        for y in ff(ctx, x):
            if isinstance(y, Err):
                yield y
            else:
                yield from walk(y)

    return Stream(walk(v), 1, None)


def _limit_run(argfns, arg_uses, ctx, v):
    nf, ff = argfns

    def gen():
        for n in nf(ctx, v):
            if isinstance(n, Err):
                yield n
                continue
            if not is_int(n):
                yield Err(f"limit: expected a number, got {type_name(n)}")
                continue
            if n <= 0:
                continue
            taken = 0
            for y in ff(ctx, v):
                yield y
                taken += 1
                if taken >= n:
                    break

    return Stream(gen())


NATIVES: Dict[Tuple[str, int], Native] = {
    (n.name, n.arity): n
    for n in (
        Native("empty", 0, _empty_run),
        Native("null", 0, _null_run),
        Native("isarr", 0, _isarr_run, reads="yes"),
        Native("range", 1, _range_run, reads="args", touches="args"),
        Native("reverse", 0, _reverse_run, reads="yes", touches="yes"),
        Native("sort", 0, _sort_run, reads="yes", touches="yes"),
        Native("recurse", 1, _recurse_run, reads="yes", touches="yes"),
        Native("limit", 2, _limit_run, reads="args", touches="args", share_args=True),
    )
}

NATIVE_SIGS = frozenset(NATIVES)

# Natives that also make sense on the left of |=; the update engines hold
# dedicated handlers for them.
PATH_NATIVES = frozenset({("empty", 0), ("recurse", 1)})
