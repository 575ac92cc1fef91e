import random

import pytest

from astgen import gen_filter, gen_value
from conftest import ERR, outs, pyout
from jqlet import compile_program, from_python
from jqlet.filters import (
    Bind, Call, Cartesian, Collect, Comma, Fold, Identity, IndexF, IntLit,
    IterAll, NativeCall, Pipe, Var, VarRef,
)
from jqlet.prelude import NATIVE_SIGS
from jqlet.resolve import (
    FreshNames, ResolveError, bound_variables, free_variables, inline_calls,
    resolve_program, resolve_variables, substitute,
)
from jqlet.syntax import parse_defs, parse_filter
import refeval


def test_fresh_names_scheme():
    fn = FreshNames()
    assert fn.fresh("x") == "x~1"
    assert fn.fresh("x") == "x~2"
    assert fn.fresh("y") == "y~1"
    # renaming an already-fresh name stays within one counter family
    assert fn.fresh("x~2") == "x~3"


def test_substitute_leaves_plain_nodes():
    fn = FreshNames()
    assert substitute(Identity(), {}, fn) == Identity()
    assert substitute(IntLit(3), {"$x": IntLit(9)}, fn) == IntLit(3)
    assert substitute(IterAll(), {"$x": IntLit(9)}, fn) == IterAll()


def test_substitute_maps_vars_and_params():
    fn = FreshNames()
    assert substitute(Var("x"), {"$x": IntLit(5)}, fn) == IntLit(5)
    assert substitute(Var("y"), {"$x": IntLit(5)}, fn) == Var("y")
    assert substitute(Call("f"), {"f": Identity()}, fn) == Identity()
    # calls with arguments keep their name, arguments are substituted
    got = substitute(Call("g", (Var("x"),)), {"$x": IntLit(5), "g": IntLit(0)}, fn)
    assert got == Call("g", (IntLit(5),))


def test_substitute_renames_binders():
    fn = FreshNames()
    got = substitute(Bind(IntLit(1), "x", Var("y")), {"$y": IntLit(5)}, fn)
    assert got == Bind(IntLit(1), "x~1", IntLit(5))


def test_substitute_fold_seed_outside_binder_scope():
    fn = FreshNames()
    fold = Fold("reduce", IterAll(), "x", Var("x"), Var("x"))
    got = substitute(fold, {"$x": IntLit(7)}, fn)
    # the seed's $x was free and gets substituted; the step's $x is bound
    assert got == Fold("reduce", IterAll(), "x~1", IntLit(7), Var("x~1"))


def test_expansion_example_shadowed_argument():
    # f(g) defined as (1 as $x | g); f($x) must not capture the argument
    defs = parse_defs("def f(g): 1 as $x | g;")
    filt = parse_filter("0 as $x | f($x)")
    inlined = inline_calls(filt, defs, NATIVE_SIGS)
    assert isinstance(inlined, Bind) and isinstance(inlined.body, Bind)
    assert inlined.body.body == Var("x")  # still the outer variable
    assert inlined.body.var != "x"
    assert outs("def f(g): 1 as $x | g; 0 as $x | f($x)") == [0]


def test_inline_passthrough():
    defs = parse_defs("def fst(f): f;")
    assert inline_calls(parse_filter("fst(1)"), defs, NATIVE_SIGS) == IntLit(1)


def test_recursive_definition_rejected():
    with pytest.raises(ResolveError, match="recursive"):
        compile_program("def r: r; r")


def test_mutual_recursion_rejected():
    with pytest.raises(ResolveError):
        compile_program("def a: b; def b: a; a")


def test_unknown_filter_rejected():
    with pytest.raises(ResolveError, match="nosuch"):
        compile_program("nosuch")
    with pytest.raises(ResolveError):
        compile_program("limit(1)")  # wrong arity


def test_unbound_variable_rejected():
    with pytest.raises(ResolveError, match=r"\$z"):
        compile_program("$z")


def test_duplicate_defs_across_sources_rejected():
    with pytest.raises(ResolveError, match="duplicate"):
        compile_program("def add: 0; add", defs_source="def add: 1;")


def test_variable_distances():
    f = parse_filter("1 as $x | 2 as $y | $x + $y")
    r = resolve_program(f, [], NATIVE_SIGS)
    assert r.body.body == Cartesian("+", VarRef(1), VarRef(0))


def test_fold_scoping_distances():
    f = parse_filter("0 as $a | reduce .[] as $x ($a; $a + $x)")
    r = resolve_program(f, [], NATIVE_SIGS)
    fold = r.body
    assert fold.init == VarRef(0)  # $a, seed sees only the outer binder
    assert fold.step == Cartesian("+", VarRef(1), VarRef(0))


def _assert_closed(f, depth):
    if isinstance(f, VarRef):
        assert f.depth < depth
    if isinstance(f, (Var, Call)):
        raise AssertionError(f"unresolved node {f!r}")
    from jqlet.resolve import children

    extra = 1 if isinstance(f, (Bind, Fold)) else 0
    for i, c in enumerate(children(f)):
        # only the bind/fold body sees the new binder
        if isinstance(f, Bind):
            _assert_closed(c, depth + (extra if c is f.body else 0))
        elif isinstance(f, Fold):
            _assert_closed(c, depth + (extra if c is f.step else 0))
        else:
            _assert_closed(c, depth)


def test_resolution_total_on_closed_programs():
    rng = random.Random(99)
    for _ in range(1000):
        f = gen_filter(rng, depth=4)
        r = resolve_program(f, [], NATIVE_SIGS)
        _assert_closed(r, 0)


def test_capture_freedom_bruteforce():
    # what sigma inserts keeps its free variables free: no binder of the
    # substituted skeleton may capture them, however phi shadows names
    rng = random.Random(4242)
    for _ in range(1000):
        phi = gen_filter(rng, depth=3, scope=("a", "b"), allow_calls=False)
        image = gen_filter(rng, depth=2, scope=("b", "c"), allow_calls=False)
        key = rng.choice(("a", "b"))
        out = substitute(phi, {"$" + key: image}, FreshNames())
        if key in free_variables(phi):
            assert free_variables(image) <= free_variables(out)
        # every binder phi contributed has been renamed to a fresh name
        assert all("~" in b for b in bound_variables(out) - bound_variables(image))


def test_inlining_preserves_semantics():
    # differential check: definition expansion against the call-by-name
    # reference evaluator, on randomized programs with random definitions
    rng = random.Random(31337)
    defs = parse_defs(
        "def first(f): limit(1; f);"
        "def twice(f): f, f;"
        "def shadow(g): 1 as $a | g;"
    )
    names = [("first", 1), ("twice", 1), ("shadow", 1)]
    ref_defs = refeval.make_defs(defs)
    for i in range(1000):
        body = gen_filter(rng, depth=3, scope=("a",), allow_calls=True)
        name, _ = rng.choice(names)
        filt = Bind(IntLit(0), "a", Call(name, (body,)))
        v = gen_value(rng, depth=2)

        want = refeval.ref_eval(filt, {}, ref_defs, v)
        prog_out = [
            pyout(r)
            for r in compile_program("0 as $a | %s" % _render(Call(name, (body,))),
                                     defs_source=_render_defs(defs)).run(from_python(v))
        ]
        ref_out = [ERR if x is refeval.ERR else x for x in want]
        assert prog_out == ref_out, f"case {i}"


def _render(f):
    from jqlet.syntax import render

    return render(f)


def _render_defs(defs):
    from jqlet.syntax import render_definition

    return "\n".join(render_definition(d) for d in defs)
