"""jqlet: an interpreter for a small jq-style filter language.

The library exposes the value model (:mod:`jqlet.values`), the parser
(:mod:`jqlet.syntax`), and compiled programs (:func:`compile_program`).
``Program.run`` maps one input value to a lazy stream of value results;
errors flow through the stream as :class:`~jqlet.values.Err` tokens.
"""

from .interp import Program, compile_program, eval_filter
from .syntax import ParseError, parse_defs, parse_filter, parse_program, render
from .resolve import FreshNames, ResolveError, resolve_program, substitute
from .values import (
    Arr, Err, Stream, Value, ValueResult, cartesian, compare, duplicate,
    eq_value, from_python, render_value, share, to_python,
)

__version__ = "0.1.0"

__all__ = [
    "Arr", "Err", "FreshNames", "ParseError", "Program", "ResolveError",
    "Stream", "Value", "ValueResult", "cartesian", "compare",
    "compile_program", "duplicate", "eq_value", "eval_filter", "from_python",
    "parse_defs", "parse_filter", "parse_program", "render", "render_value",
    "resolve_program", "share", "substitute", "to_python", "__version__",
]
