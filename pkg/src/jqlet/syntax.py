"""Concrete syntax: lexer, parser, and an AST renderer that round-trips.

Binary operators, loosest to tightest: ``|`` < ``,`` < ``|=`` < ``or`` <
``and`` < ``== !=`` < ``< <= > >=`` < ``+ -`` < ``* /`` < ``%``.  Postfix
``?``, bracket forms on ``.``, parentheses and ``[f]`` collection bind
tightest.  ``|`` , ``|=``, ``or`` and ``and`` associate to the right, ``,``
and the arithmetic operators to the left; chains of equal-precedence
comparisons are rejected.  ``-f`` is sugar for ``0 - f``.  ``f as $x | body``
and the branches of ``if`` extend maximally to the right.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

from .filters import (
    And, Bind, Call, Cartesian, Collect, Comma, Definition, Filter, Fold,
    FOREACH, Identity, If, IndexF, IntLit, IterAll, Or, Pipe, REDUCE, Try,
    Update, Var,
)
from .values import INT_MAX, INT_MIN

KEYWORDS = frozenset(
    ["if", "then", "else", "end", "as", "reduce", "foreach", "def", "and", "or", "empty"]
)

_SYMBOLS = ["|=", "==", "!=", "<=", ">="] + list("|,.[]()?;:<>+-*/%")


class ParseError(Exception):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {msg}")
        self.msg = msg
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Token:
    kind: str  # int | ident | var | sym | kw | eof
    value: object
    line: int
    col: int


def tokenize(text: str) -> List[Token]:
    toks = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c.isspace():
            i += 1
            col += 1
            continue
        start_col = col
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            lit = int(text[i:j])
            if lit > INT_MAX:
                raise ParseError(f"integer literal out of range: {text[i:j]}", line, start_col)
            toks.append(Token("int", lit, line, start_col))
            col += j - i
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            toks.append(Token("kw" if word in KEYWORDS else "ident", word, line, start_col))
            col += j - i
            i = j
            continue
        if c == "$":
            j = i + 1
            if j >= n or not (text[j].isalpha() or text[j] == "_"):
                raise ParseError("expected a variable name after $", line, start_col)
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(Token("var", text[i + 1 : j], line, start_col))
            col += j - i
            i = j
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                toks.append(Token("sym", sym, line, start_col))
                i += len(sym)
                col += len(sym)
                break
        else:
            raise ParseError(f"unexpected character {c!r}", line, start_col)
    toks.append(Token("eof", None, line, col))
    return toks


# (operator set, associativity), loosest level first.
_LEVELS: Tuple[Tuple[frozenset, str], ...] = (
    (frozenset({"|"}), "right"),
    (frozenset({","}), "left"),
    (frozenset({"|="}), "right"),
    (frozenset({"or"}), "right"),
    (frozenset({"and"}), "right"),
    (frozenset({"==", "!="}), "nonassoc"),
    (frozenset({"<", "<=", ">", ">="}), "nonassoc"),
    (frozenset({"+", "-"}), "left"),
    (frozenset({"*", "/"}), "left"),
    (frozenset({"%"}), "left"),
)


def _binary(op: str, left: Filter, right: Filter) -> Filter:
    if op == "|":
        return Pipe(left, right)
    if op == ",":
        return Comma(left, right)
    if op == "|=":
        return Update(left, right)
    if op == "or":
        return Or(left, right)
    if op == "and":
        return And(left, right)
    return Cartesian(op, left, right)


class Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.pos = 0

    def peek(self) -> Token:
        return self.toks[self.pos]

    def next(self) -> Token:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def error(self, msg: str) -> ParseError:
        t = self.peek()
        return ParseError(msg, t.line, t.col)

    def expect(self, kind: str, value=None) -> Token:
        t = self.peek()
        if t.kind != kind or (value is not None and t.value != value):
            want = value if value is not None else kind
            got = "end of input" if t.kind == "eof" else repr(t.value)
            raise self.error(f"expected {want!r}, found {got}" if value else f"expected {want}, found {got}")
        return self.next()

    def _op_at(self, ops: frozenset) -> Optional[str]:
        t = self.peek()
        if t.kind in ("sym", "kw") and t.value in ops:
            return t.value
        return None

    def parse_expr(self, level: int = 0) -> Filter:
        if level == len(_LEVELS):
            return self._unary()
        ops, assoc = _LEVELS[level]
        left = self.parse_expr(level + 1)
        if assoc == "left":
            while (op := self._op_at(ops)) is not None:
                self.next()
                left = _binary(op, left, self.parse_expr(level + 1))
            return left
        if assoc == "right":
            if (op := self._op_at(ops)) is not None:
                self.next()
                return _binary(op, left, self.parse_expr(level))
            return left
        # nonassoc: one application allowed, chains are a syntax error
        if (op := self._op_at(ops)) is not None:
            self.next()
            right = self.parse_expr(level + 1)
            if self._op_at(ops) is not None:
                raise self.error(f"comparison operators cannot be chained (after {op!r})")
            return _binary(op, left, right)
        return left

    def _unary(self) -> Filter:
        if self._op_at(frozenset({"-"})) is not None:
            self.next()
            return Cartesian("-", IntLit(0), self._unary())
        return self._postfix()

    def _postfix(self, bind_ok: bool = True) -> Filter:
        node = self._primary()
        while True:
            t = self.peek()
            if t.kind == "sym" and t.value == "?":
                self.next()
                node = Try(node)
                continue
            if bind_ok and t.kind == "kw" and t.value == "as":
                self.next()
                var = self.expect("var").value
                self.expect("sym", "|")
                return Bind(node, var, self.parse_expr(0))
            return node

    def _primary(self) -> Filter:
        t = self.peek()
        if t.kind == "int":
            self.next()
            return IntLit(t.value)
        if t.kind == "var":
            self.next()
            return Var(t.value)
        if t.kind == "sym" and t.value == ".":
            self.next()
            return self._dot_chain()
        if t.kind == "sym" and t.value == "[":
            self.next()
            if self._op_at(frozenset({"]"})) is not None:
                self.next()
                return Collect(Call("empty"))  # [] builds the empty array
            body = self.parse_expr(0)
            self.expect("sym", "]")
            return Collect(body)
        if t.kind == "sym" and t.value == "(":
            self.next()
            inner = self.parse_expr(0)
            self.expect("sym", ")")
            return inner
        if t.kind == "kw" and t.value == "if":
            self.next()
            cond = self.parse_expr(0)
            self.expect("kw", "then")
            then = self.parse_expr(0)
            self.expect("kw", "else")
            orelse = self.parse_expr(0)
            self.expect("kw", "end")
            return If(cond, then, orelse)
        if t.kind == "kw" and t.value in (REDUCE, FOREACH):
            kind = self.next().value
            src = self._postfix(bind_ok=False)
            self.expect("kw", "as")
            var = self.expect("var").value
            self.expect("sym", "(")
            init = self.parse_expr(0)
            self.expect("sym", ";")
            step = self.parse_expr(0)
            self.expect("sym", ")")
            return Fold(kind, src, var, init, step)
        if t.kind == "kw" and t.value == "empty":
            self.next()
            return Call("empty")
        if t.kind == "ident":
            self.next()
            if self._op_at(frozenset({"("})) is not None:
                self.next()
                args = [self.parse_expr(0)]
                while self._op_at(frozenset({";"})) is not None:
                    self.next()
                    args.append(self.parse_expr(0))
                self.expect("sym", ")")
                return Call(t.value, tuple(args))
            return Call(t.value)
        got = "end of input" if t.kind == "eof" else repr(t.value)
        raise self.error(f"expected a filter, found {got}")

    def _dot_chain(self) -> Filter:
        node: Filter = Identity()
        first = True
        while self._op_at(frozenset({"["})) is not None:
            self.next()
            if self._op_at(frozenset({"]"})) is not None:
                self.next()
                seg: Filter = IterAll()
            else:
                seg = IndexF(self.parse_expr(0))
                self.expect("sym", "]")
            node = seg if first else Pipe(node, seg)
            first = False
        return node

    def parse_definition(self) -> Definition:
        self.expect("kw", "def")
        name_tok = self.expect("ident")
        params: List[str] = []
        if self._op_at(frozenset({"("})) is not None:
            self.next()
            params.append(self.expect("ident").value)
            while self._op_at(frozenset({";"})) is not None:
                self.next()
                params.append(self.expect("ident").value)
            self.expect("sym", ")")
        if len(set(params)) != len(params):
            raise ParseError(
                f"duplicate parameter in def {name_tok.value}", name_tok.line, name_tok.col
            )
        self.expect("sym", ":")
        body = self.parse_expr(0)
        self.expect("sym", ";")
        return Definition(name_tok.value, tuple(params), body)

    def parse_defs_section(self) -> List[Definition]:
        defs: List[Definition] = []
        seen = set()
        while self.peek().kind == "kw" and self.peek().value == "def":
            t = self.peek()
            d = self.parse_definition()
            key = (d.name, d.arity)
            if key in seen:
                raise ParseError(f"duplicate definition of {d.name}/{d.arity}", t.line, t.col)
            seen.add(key)
            defs.append(d)
        return defs


def parse_filter(text: str) -> Filter:
    p = Parser(text)
    f = p.parse_expr(0)
    p.expect("eof")
    return f


def parse_defs(text: str) -> List[Definition]:
    p = Parser(text)
    defs = p.parse_defs_section()
    p.expect("eof")
    return defs


def parse_program(text: str) -> Tuple[List[Definition], Filter]:
    """A program is zero or more definitions followed by one filter."""
    p = Parser(text)
    defs = p.parse_defs_section()
    f = p.parse_expr(0)
    p.expect("eof")
    return defs, f


def render(f: Filter) -> str:
    """Concrete syntax for a named-form AST; output is fully parenthesized
    where needed and parses back to a structurally equal tree."""
    if isinstance(f, IntLit):
        return str(f.value)
    if isinstance(f, Var):
        return f"${f.name}"
    if isinstance(f, Identity):
        return "."
    if isinstance(f, IterAll):
        return ".[]"
    if isinstance(f, IndexF):
        return f".[{render(f.idx)}]"
    if isinstance(f, Collect):
        return f"[{render(f.body)}]"
    if isinstance(f, Try):
        return f"{_atom(f.body)}?"
    if isinstance(f, Pipe):
        return f"({render(f.left)} | {render(f.right)})"
    if isinstance(f, Comma):
        return f"({render(f.left)}, {render(f.right)})"
    if isinstance(f, Update):
        return f"({render(f.target)} |= {render(f.expr)})"
    if isinstance(f, And):
        return f"({render(f.left)} and {render(f.right)})"
    if isinstance(f, Or):
        return f"({render(f.left)} or {render(f.right)})"
    if isinstance(f, Cartesian):
        return f"({render(f.left)} {f.op} {render(f.right)})"
    if isinstance(f, If):
        return f"(if {render(f.cond)} then {render(f.then)} else {render(f.orelse)} end)"
    if isinstance(f, Bind):
        return f"({render(f.src)} as ${f.var} | {render(f.body)})"
    if isinstance(f, Fold):
        return f"({f.kind} {_atom(f.src)} as ${f.var} ({render(f.init)}; {render(f.step)}))"
    if isinstance(f, Call):
        if not f.args:
            return f.name
        return f"{f.name}({'; '.join(render(a) for a in f.args)})"
    raise TypeError(f"cannot render {f!r}")


def _atom(f: Filter) -> str:
    """Render with parentheses unless the node already binds tightest."""
    s = render(f)
    if s.startswith("("):
        return s
    if isinstance(f, (IntLit, Var, Identity, IterAll, IndexF, Collect, Call)):
        return s
    return f"({s})"


def render_definition(d: Definition) -> str:
    head = d.name if not d.params else f"{d.name}({'; '.join(d.params)})"
    return f"def {head}: {render(d.body)};"
