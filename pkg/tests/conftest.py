import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from jqlet import compile_program, from_python
from jqlet.values import Arr, Err, to_python

ERR = "<error>"


def pyout(r):
    """Main-implementation result to plain Python, errors to a marker."""
    if isinstance(r, Err):
        return ERR
    return to_python(r)


def outs(src, inp=None, **kw):
    """Compile and run; outputs as plain Python with ERR markers."""
    prog = compile_program(src, **kw)
    return [pyout(r) for r in prog.run(from_python(inp))]
