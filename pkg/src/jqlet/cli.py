"""Command-line front end.

Exit codes: 0 success, 2 parse or resolution error, 3 input decode error,
5 when an error token appeared in some output stream (remaining inputs are
still processed).
"""

from __future__ import annotations

import argparse
import sys
from typing import List, Optional

from .interp import compile_program
from .resolve import ResolveError
from .syntax import ParseError
from .values import INT_MAX, INT_MIN, Arr, Err, Value, render_value


class DecodeError(ValueError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {msg}")
        self.line = line
        self.col = col


class _Decoder:
    """Reader for the value subset: null, true, false, 64-bit integers, and
    arrays thereof."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def _where(self):
        upto = self.text[: self.pos]
        line = upto.count("\n") + 1
        col = self.pos - (upto.rfind("\n") + 1) + 1
        return line, col

    def error(self, msg: str) -> DecodeError:
        return DecodeError(msg, *self._where())

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)

    def value(self) -> Value:
        self.skip_ws()
        if self.pos >= len(self.text):
            raise self.error("expected a value")
        c = self.text[self.pos]
        if c == "[":
            return self.array()
        if c.isalpha():
            return self.word()
        if c == "-" or c.isdigit():
            return self.integer()
        raise self.error(f"unexpected character {c!r}")

    def word(self) -> Value:
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isalpha():
            self.pos += 1
        w = self.text[start : self.pos]
        if w == "null":
            return None
        if w == "true":
            return True
        if w == "false":
            return False
        self.pos = start
        raise self.error(f"unknown literal {w!r}")

    def integer(self) -> int:
        start = self.pos
        if self.text[self.pos] == "-":
            self.pos += 1
        digits = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == digits:
            self.pos = start
            raise self.error("expected digits")
        n = int(self.text[start : self.pos])
        if not INT_MIN <= n <= INT_MAX:
            self.pos = start
            raise self.error(f"integer out of 64-bit range: {n}")
        return n

    def array(self) -> Arr:
        self.pos += 1  # consume [
        xs = []
        self.skip_ws()
        if self.pos < len(self.text) and self.text[self.pos] == "]":
            self.pos += 1
            return Arr(xs)
        while True:
            xs.append(self.value())
            self.skip_ws()
            if self.pos >= len(self.text):
                raise self.error("unterminated array")
            c = self.text[self.pos]
            if c == ",":
                self.pos += 1
                continue
            if c == "]":
                self.pos += 1
                return Arr(xs)
            raise self.error(f"expected ',' or ']', found {c!r}")


def decode_value(text: str) -> Value:
    """Decode exactly one subset value; trailing input is an error."""
    d = _Decoder(text)
    v = d.value()
    if not d.at_end():
        raise d.error("trailing input after value")
    return v


def decode_many(text: str) -> List[Value]:
    """Decode zero or more whitespace-separated subset values."""
    d = _Decoder(text)
    out = []
    while not d.at_end():
        out.append(d.value())
    return out


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="jqlet",
        description="Run a filter over whitespace-separated input values "
        "(null, booleans, 64-bit integers, arrays).",
    )
    ap.add_argument("filter", nargs="?", help="the filter program")
    ap.add_argument("input", nargs="?", help="input file (default: stdin)")
    ap.add_argument("-f", "--from-file", dest="filter_file", metavar="FILE",
                    help="read the filter program from FILE")
    ap.add_argument("-n", "--null-input", action="store_true",
                    help="run the filter once with null input")
    ap.add_argument("--engine", choices=("new", "legacy"), default="new",
                    help="update engine for |= (default: new)")
    ap.add_argument("--defs", metavar="FILE",
                    help="load extra filter definitions from FILE")
    ap.add_argument("--no-prelude", action="store_true",
                    help="do not load the built-in filter definitions")
    ap.add_argument("--length", action="store_true",
                    help="pipe the program through the length filter")
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = _build_parser().parse_args(argv)

    if args.filter_file is not None and args.filter is not None:
        # with -f the first positional is the input file
        if args.input is not None:
            print("jqlet: too many arguments for -f mode", file=sys.stderr)
            return 2
        args.input, args.filter = args.filter, None
    if (args.filter is None) == (args.filter_file is None):
        print("jqlet: exactly one of FILTER or -f FILE is required", file=sys.stderr)
        return 2
    if args.filter_file is not None:
        try:
            with open(args.filter_file, encoding="utf-8") as fh:
                source = fh.read()
        except OSError as exc:
            print(f"jqlet: {exc}", file=sys.stderr)
            return 2
    else:
        source = args.filter

    defs_source = None
    if args.defs:
        try:
            with open(args.defs, encoding="utf-8") as fh:
                defs_source = fh.read()
        except OSError as exc:
            print(f"jqlet: {exc}", file=sys.stderr)
            return 2

    try:
        prog = compile_program(
            source,
            defs_source=defs_source,
            use_prelude=not args.no_prelude,
            engine=args.engine,
            pipe_length=args.length,
        )
    except (ParseError, ResolveError) as exc:
        print(f"jqlet: {exc}", file=sys.stderr)
        return 2
    for w in prog.warnings:
        print(f"jqlet: warning: {w}", file=sys.stderr)

    if args.null_input:
        inputs = [None]
    else:
        try:
            if args.input:
                with open(args.input, encoding="utf-8") as fh:
                    text = fh.read()
            else:
                text = sys.stdin.read()
        except OSError as exc:
            print(f"jqlet: {exc}", file=sys.stderr)
            return 3
        try:
            inputs = decode_many(text)
        except DecodeError as exc:
            print(f"jqlet: input: {exc}", file=sys.stderr)
            return 3

    saw_error = False
    for v in inputs:
        for r in prog.run(v):
            if isinstance(r, Err):
                print(f"jqlet: error: {r.msg}", file=sys.stderr)
                saw_error = True
            else:
                print(render_value(r))
    return 5 if saw_error else 0


def entry():  # console script hook
    raise SystemExit(main())
