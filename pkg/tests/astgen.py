"""Seeded random generators for filters and values, shared by the property
suites.  Everything is driven by an explicit random.Random so failures
reproduce from the printed seed."""

import random

from jqlet.filters import (
    And, Bind, Call, Cartesian, Collect, Comma, Fold, FOREACH, Identity, If,
    IndexF, IntLit, IterAll, Or, Pipe, REDUCE, Try, Var,
)

VAR_POOL = ("a", "b", "c", "d")
CARTESIAN_OPS = ("==", "!=", "<", "<=", ">", ">=", "+", "-", "*", "/", "%")


def gen_value(rng: random.Random, depth: int = 2):
    """A random plain-Python subset value (None/bool/int/list)."""
    roll = rng.random()
    if depth <= 0 or roll < 0.55:
        return rng.choice([None, True, False, rng.randint(-3, 3), 0, 1, 2])
    return [gen_value(rng, depth - 1) for _ in range(rng.randint(0, 3))]


def gen_array(rng: random.Random, depth: int = 2, max_len: int = 4):
    return [gen_value(rng, depth - 1) for _ in range(rng.randint(0, max_len))]


def gen_filter(rng: random.Random, depth: int, scope=(), allow_calls=True):
    """A random named-form filter; every variable reference is bound."""
    leaves = ["int", "identity", "iterall"]
    if scope:
        leaves.append("var")
    if depth <= 0:
        kind = rng.choice(leaves)
    else:
        inner = [
            "index", "collect", "try", "pipe", "comma", "cartesian",
            "and", "or", "if", "bind", "fold",
        ]
        if allow_calls:
            inner += ["call"]
        kind = rng.choice(leaves + inner * 2)
    d = depth - 1
    if kind == "int":
        return IntLit(rng.randint(0, 3))
    if kind == "identity":
        return Identity()
    if kind == "iterall":
        return IterAll()
    if kind == "var":
        return Var(rng.choice(scope))
    if kind == "index":
        return IndexF(gen_filter(rng, d, scope, allow_calls))
    if kind == "collect":
        return Collect(gen_filter(rng, d, scope, allow_calls))
    if kind == "try":
        return Try(gen_filter(rng, d, scope, allow_calls))
    if kind == "pipe":
        return Pipe(gen_filter(rng, d, scope, allow_calls), gen_filter(rng, d, scope, allow_calls))
    if kind == "comma":
        return Comma(gen_filter(rng, d, scope, allow_calls), gen_filter(rng, d, scope, allow_calls))
    if kind == "cartesian":
        return Cartesian(
            rng.choice(CARTESIAN_OPS),
            gen_filter(rng, d, scope, allow_calls),
            gen_filter(rng, d, scope, allow_calls),
        )
    if kind == "and":
        return And(gen_filter(rng, d, scope, allow_calls), gen_filter(rng, d, scope, allow_calls))
    if kind == "or":
        return Or(gen_filter(rng, d, scope, allow_calls), gen_filter(rng, d, scope, allow_calls))
    if kind == "if":
        return If(
            gen_filter(rng, d, scope, allow_calls),
            gen_filter(rng, d, scope, allow_calls),
            gen_filter(rng, d, scope, allow_calls),
        )
    if kind == "bind":
        var = rng.choice(VAR_POOL)
        return Bind(
            gen_filter(rng, d, scope, allow_calls),
            var,
            gen_filter(rng, d, scope + (var,), allow_calls),
        )
    if kind == "fold":
        var = rng.choice(VAR_POOL)
        return Fold(
            rng.choice((REDUCE, FOREACH)),
            gen_filter(rng, d, scope, allow_calls),
            var,
            gen_filter(rng, d, scope, allow_calls),
            gen_filter(rng, d, scope + (var,), allow_calls),
        )
    if kind == "call":
        name = rng.choice(("empty", "range", "limit", "isarr"))
        if name == "range":
            return Call("range", (IntLit(rng.randint(0, 3)),))
        if name == "limit":
            return Call(
                "limit",
                (IntLit(rng.randint(0, 2)), gen_filter(rng, d, scope, allow_calls)),
            )
        return Call(name)
    raise AssertionError(kind)


def gen_path_filter(rng: random.Random, depth: int):
    """A random path expression over ., .[], .[i], pipe, and comma."""
    if depth <= 0:
        kind = rng.choice(("dot", "iter", "idx"))
    else:
        kind = rng.choice(("dot", "iter", "idx", "pipe", "comma", "pipe", "comma"))
    if kind == "dot":
        return Identity()
    if kind == "iter":
        return IterAll()
    if kind == "idx":
        return IndexF(IntLit(rng.randint(0, 2)))
    if kind == "pipe":
        return Pipe(gen_path_filter(rng, depth - 1), gen_path_filter(rng, depth - 1))
    return Comma(gen_path_filter(rng, depth - 1), gen_path_filter(rng, depth - 1))
