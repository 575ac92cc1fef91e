"""Value model: a JSON subset plus the stream machinery the evaluator runs on.

A value is ``None`` (null), a ``bool``, an ``int`` (kept inside the signed
64-bit range by arithmetic), or an :class:`Arr`.  Scalars are plain Python
objects; arrays wrap a list spine together with a copy-on-write flag.
:class:`Err` is the error token; errors travel through streams as ordinary
elements instead of raising.

Copy-on-write contract: ``duplicate`` is O(1) and hands out the same array
object after marking it shared.  An array spine may be mutated in place only
while ``shared`` is false, which by convention means the mutator is the one
live holder.  Every operation that gives a value to a second holder routes it
through ``share`` first; element reads (``index``, ``elems``) mark the
retrieved element because the parent array keeps holding it.
"""

from __future__ import annotations

from typing import Callable, Iterable, Iterator, Optional, Union

INT_MIN = -(2**63)
INT_MAX = 2**63 - 1


class Err:
    """Error token. The message is diagnostic only; any two errors are equal."""

    __slots__ = ("msg",)

    def __init__(self, msg: str = "error"):
        self.msg = msg

    def __eq__(self, other):
        return isinstance(other, Err)

    def __ne__(self, other):
        return not isinstance(other, Err)

    def __hash__(self):
        return 0x5E

    def __repr__(self):
        return f"Err({self.msg!r})"


class Arr:
    """Array value: a list spine plus the copy-on-write ``shared`` flag."""

    __slots__ = ("xs", "shared")

    def __init__(self, xs: list, shared: bool = False):
        self.xs = xs
        self.shared = shared

    def __eq__(self, other):
        if not isinstance(other, Arr):
            return NotImplemented
        return self is other or compare(self, other) == 0

    def __ne__(self, other):
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    __hash__ = None

    def __len__(self):
        return len(self.xs)

    def __repr__(self):
        return f"Arr({self.xs!r})"


Value = Union[None, bool, int, Arr]
ValueResult = Union[Value, Err]


def is_int(v) -> bool:
    # bool is an int subclass in Python; booleans are a distinct kind here.
    return isinstance(v, int) and not isinstance(v, bool)


def type_name(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "boolean"
    if isinstance(v, Arr):
        return "array"
    if isinstance(v, int):
        return "number"
    if isinstance(v, Err):
        return "error"
    raise TypeError(f"not a value: {v!r}")


def share(v):
    """Mark ``v`` as held by more than one party. O(1); returns ``v``."""
    if isinstance(v, Arr):
        v.shared = True
    return v


def duplicate(v):
    """Constant-time logical copy: both holders now see the same shared object."""
    return share(v)


def eq_value(a, b) -> bool:
    """Semantic equality; unlike ``==`` on raw Python objects, 1 != true."""
    if isinstance(a, Err) or isinstance(b, Err):
        return isinstance(a, Err) and isinstance(b, Err)
    return compare(a, b) == 0


def _rank(v) -> int:
    if v is None:
        return 0
    if isinstance(v, bool):
        return 1
    if isinstance(v, Arr):
        return 3
    return 2


def compare(a, b) -> int:
    """Total order: null < false < true < numbers < arrays (lexicographic)."""
    ra, rb = _rank(a), _rank(b)
    if ra != rb:
        return -1 if ra < rb else 1
    if ra == 0:
        return 0
    if ra != 3:
        return (a > b) - (a < b)
    for x, y in zip(a.xs, b.xs):
        c = compare(x, y)
        if c:
            return c
    na, nb = len(a.xs), len(b.xs)
    return (na > nb) - (na < nb)


_CMP = {
    "==": lambda c: c == 0,
    "!=": lambda c: c != 0,
    "<": lambda c: c < 0,
    "<=": lambda c: c <= 0,
    ">": lambda c: c > 0,
    ">=": lambda c: c >= 0,
}

CARTESIAN_OPS = ("==", "!=", "<", "<=", ">", ">=", "+", "-", "*", "/", "%")


def _in_range(n: int):
    if INT_MIN <= n <= INT_MAX:
        return n
    return Err("integer overflow")


def cartesian(op: str, a, b):
    """Apply a binary value operator; returns a value or an error token.

    Comparisons are total.  ``+`` concatenates arrays, adds integers, and
    treats null as its identity.  ``- * / %`` are integer-only; division and
    remainder truncate toward zero, a zero right operand is an error, and any
    result outside the signed 64-bit range is an error.
    """
    cmp = _CMP.get(op)
    if cmp is not None:
        return cmp(compare(a, b))
    if op == "+":
        return _add(a, b)
    if not (is_int(a) and is_int(b)):
        return Err(f"cannot compute {type_name(a)} {op} {type_name(b)}")
    if op == "-":
        return _in_range(a - b)
    if op == "*":
        return _in_range(a * b)
    if b == 0:
        return Err(f"{type_name(a)} ({a}) cannot be divided by zero")
    q = a // b
    if q < 0 and b * q != a:
        q += 1  # Python floors; truncate toward zero instead
    if op == "/":
        return _in_range(q)
    if op == "%":
        return _in_range(a - b * q)
    raise ValueError(f"unknown operator {op!r}")


def _add(a, b):
    if a is None:
        return b
    if b is None:
        return a
    if is_int(a) and is_int(b):
        return _in_range(a + b)
    if isinstance(a, Arr) and isinstance(b, Arr):
        if a.shared:
            return Arr(a.xs + b.xs)
        # Sole holder: extend in place. This is what makes building an array
        # by repeated concatenation O(N) instead of O(N^2).
        a.xs.extend(b.xs)
        return a
    return Err(f"cannot add {type_name(a)} and {type_name(b)}")


def index(v, i):
    """The i-th element of an array, with negative indices counting from the
    end; an error for non-arrays, non-integer indices, or out of range."""
    if not isinstance(v, Arr):
        return Err(f"cannot index {type_name(v)}")
    if not is_int(i):
        return Err(f"array index must be a number, got {type_name(i)}")
    n = len(v.xs)
    j = i if i >= 0 else n + i
    if 0 <= j < n:
        return share(v.xs[j])
    return Err(f"index {i} out of range for array of length {n}")


def elems(v) -> "Stream":
    """All elements of an array in order; a one-error stream otherwise."""
    if isinstance(v, Arr):
        xs = v.xs
        return Stream(map(share, xs), len(xs), len(xs))
    return Stream.single(Err(f"cannot iterate over {type_name(v)}"))


def stream_to_array(s: Iterable):
    """Collect a finite stream into a fresh array, or the leftmost error."""
    out = []
    for x in s:
        if isinstance(x, Err):
            return x
        out.append(x)
    return Arr(out)


def splice_at(v, i: int, replacement: Iterable):
    """Replace the i-th element of ``v`` by all values of ``replacement``.

    The replacement stream may be empty (deletes the element) or longer than
    one (splices several elements in).  Errors: non-array input, index out of
    range after negative normalization, or an error inside the replacement.
    """
    if not isinstance(v, Arr):
        return Err(f"cannot update index of {type_name(v)}")
    n = len(v.xs)
    j = i if i >= 0 else n + i
    if not 0 <= j < n:
        return Err(f"index {i} out of range for array of length {n}")
    out = list(v.xs[:j])
    for r in replacement:
        if isinstance(r, Err):
            return r
        out.append(r)
    out.extend(v.xs[j + 1 :])
    return Arr(out)


def ite(v, pivot, then_s: "Stream", else_s: "Stream") -> "Stream":
    """Three-way selector: error input short-circuits, the pivot value picks
    the then-stream, anything else picks the else-stream."""
    if isinstance(v, Err):
        return Stream.single(v)
    if eq_value(v, pivot):
        return then_s
    return else_s


class Stream:
    """Lazily produced, ordered, possibly infinite sequence of value results.

    Carries a lower and an optional upper bound on the number of elements,
    used for the exactly-one-output fast paths.  Single consumer; consuming
    never re-runs earlier work.
    """

    __slots__ = ("it", "lo", "hi")

    def __init__(self, it, lo: int = 0, hi: Optional[int] = None):
        self.it = iter(it)
        self.lo = lo
        self.hi = hi

    def __iter__(self):
        return self.it

    def is_singleton(self) -> bool:
        return self.lo == 1 and self.hi == 1

    @classmethod
    def empty(cls) -> "Stream":
        return cls((), 0, 0)

    @classmethod
    def single(cls, x) -> "Stream":
        return cls((x,), 1, 1)

    @classmethod
    def of(cls, *xs) -> "Stream":
        return cls(xs, len(xs), len(xs))


_DONE = object()


def fold_stream(foreach: bool, items: list, step: Callable, seeds: Stream) -> Iterator:
    """Depth-first fold of ``step`` over ``items``, one run per seed state.

    ``step(x, state)`` returns the stream of successor states; several
    outputs branch the fold and each branch continues independently.  With
    ``foreach`` false only the states that consumed every item are emitted;
    with ``foreach`` true every state a step produces is emitted the moment
    it is produced.  An error item or state ends its branch with that error.

    ``items`` must already be shared by the caller (they are bound once per
    branch).  Emitted foreach states are marked shared here because the fold
    keeps folding on them after handing them out.
    """
    nitems = len(items)
    stack = [(iter(seeds), 0)]
    while stack:
        it, depth = stack[-1]
        y = next(it, _DONE)
        if y is _DONE:
            stack.pop()
            continue
        while True:
            if isinstance(y, Err):
                yield y
                break
            if foreach and depth > 0:
                yield share(y)
            if depth == nitems:
                if not foreach:
                    yield y
                break
            x = items[depth]
            if isinstance(x, Err):
                yield x
                break
            out = step(x, y)
            depth += 1
            if out.lo == 1 and out.hi == 1:
                # Exactly one successor: stay in this frame instead of
                # stacking a generator per item (keeps long reduces flat).
                y = next(iter(out), _DONE)
                if y is _DONE:
                    raise RuntimeError("stream bounds violation: empty singleton")
                continue
            stack.append((iter(out), depth))
            break


def render_value(v) -> str:
    """Canonical text: null, true, false, decimal integers, [a,b] without
    whitespace."""
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Arr):
        return "[" + ",".join(render_value(x) for x in v.xs) + "]"
    if is_int(v):
        return str(v)
    raise TypeError(f"not a renderable value: {v!r}")


def from_python(obj) -> Value:
    """Build a value from nested Python ``None``/``bool``/``int``/``list``."""
    if obj is None or isinstance(obj, bool):
        return obj
    if isinstance(obj, int):
        if not INT_MIN <= obj <= INT_MAX:
            raise ValueError(f"integer out of 64-bit range: {obj}")
        return obj
    if isinstance(obj, (list, tuple)):
        return Arr([from_python(x) for x in obj])
    raise TypeError(f"cannot convert {type(obj).__name__} to a value")


def to_python(v):
    if isinstance(v, Arr):
        return [to_python(x) for x in v.xs]
    if v is None or isinstance(v, (bool, int)):
        return v
    raise TypeError(f"not a value: {v!r}")
