"""Filter syntax trees.

Parsing produces the named form (``Var``, ``Call``).  Name resolution
rewrites a program into an executable form in which every variable is a
``VarRef`` carrying its binder distance, every call to a defined filter has
been expanded away, and the remaining calls are ``NativeCall`` nodes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple, Union

REDUCE = "reduce"
FOREACH = "foreach"


@dataclass(frozen=True)
class IntLit:
    value: int


@dataclass(frozen=True)
class Var:
    name: str  # without the leading $


@dataclass(frozen=True)
class VarRef:
    depth: int  # number of binders between use and its binder


@dataclass(frozen=True)
class Identity:
    pass


@dataclass(frozen=True)
class IterAll:
    pass


@dataclass(frozen=True)
class IndexF:
    idx: "Filter"


@dataclass(frozen=True)
class Collect:
    body: "Filter"


@dataclass(frozen=True)
class Try:
    body: "Filter"  # f?


@dataclass(frozen=True)
class Pipe:
    left: "Filter"
    right: "Filter"


@dataclass(frozen=True)
class Comma:
    left: "Filter"
    right: "Filter"


@dataclass(frozen=True)
class Update:
    target: "Filter"  # path side
    expr: "Filter"  # replacement filter, evaluated in the scope of this node


@dataclass(frozen=True)
class And:
    left: "Filter"
    right: "Filter"


@dataclass(frozen=True)
class Or:
    left: "Filter"
    right: "Filter"


@dataclass(frozen=True)
class Cartesian:
    op: str  # one of values.CARTESIAN_OPS
    left: "Filter"
    right: "Filter"


@dataclass(frozen=True)
class If:
    cond: "Filter"
    then: "Filter"
    orelse: "Filter"


@dataclass(frozen=True)
class Bind:
    src: "Filter"
    var: str
    body: "Filter"  # src as $var | body


@dataclass(frozen=True)
class Fold:
    kind: str  # REDUCE or FOREACH
    src: "Filter"
    var: str
    init: "Filter"
    step: "Filter"


@dataclass(frozen=True)
class Call:
    name: str
    args: Tuple["Filter", ...] = ()


@dataclass(frozen=True)
class NativeCall:
    name: str
    args: Tuple["Filter", ...] = ()


Filter = Union[
    IntLit, Var, VarRef, Identity, IterAll, IndexF, Collect, Try,
    Pipe, Comma, Update, And, Or, Cartesian, If, Bind, Fold, Call, NativeCall,
]


@dataclass(frozen=True)
class Definition:
    name: str
    params: Tuple[str, ...]
    body: Filter

    @property
    def arity(self) -> int:
        return len(self.params)


def describe(f: Filter) -> str:
    """Short human name for a node kind, used in diagnostics."""
    if isinstance(f, IntLit):
        return f"literal {f.value}"
    if isinstance(f, (Var, VarRef)):
        return "variable"
    if isinstance(f, Cartesian):
        return f"operator {f.op}"
    if isinstance(f, Collect):
        return "array construction"
    if isinstance(f, Try):
        return "postfix ?"
    if isinstance(f, Fold):
        return f.kind
    if isinstance(f, Update):
        return "update"
    if isinstance(f, (Call, NativeCall)):
        return f"call {f.name}"
    return type(f).__name__.lower()
