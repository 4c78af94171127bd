import random

import pytest
from hypothesis import given, settings, strategies as st

from nfbisim.terms import (Abs, App, ESub, ParseError, Var, alpha_eq, fresh, parse,
                           random_term, random_value, rename_apart, show, subst)


# independent oracle: locally nameless conversion
def debruijn(t, env=()):
    if isinstance(t, Var):
        return ("b", env.index(t.name)) if t.name in env else ("f", t.name)
    if isinstance(t, Abs):
        return ("lam", debruijn(t.body, (t.var,) + env))
    if isinstance(t, App):
        return ("app", debruijn(t.fn, env), debruijn(t.arg, env))
    return ("es", debruijn(t.body, (t.var,) + env), debruijn(t.arg, env))


def db_subst(d, x, v, depth=0):
    # substitute closed-under-shift value v (as de Bruijn, free names only) for free x
    tag = d[0]
    if tag == "f":
        return shift(v, depth) if d[1] == x else d
    if tag == "b":
        return d
    if tag == "lam":
        return ("lam", db_subst(d[1], x, v, depth + 1))
    if tag == "app":
        return ("app", db_subst(d[1], x, v, depth), db_subst(d[2], x, v, depth))
    return ("es", db_subst(d[1], x, v, depth + 1), db_subst(d[2], x, v, depth))


def shift(d, by, cutoff=0):
    tag = d[0]
    if tag == "f":
        return d
    if tag == "b":
        return ("b", d[1] + by) if d[1] >= cutoff else d
    if tag == "lam":
        return ("lam", shift(d[1], by, cutoff + 1))
    if tag == "app":
        return ("app", shift(d[1], by, cutoff), shift(d[2], by, cutoff))
    return ("es", shift(d[1], by, cutoff + 1), shift(d[2], by, cutoff))


terms_es = st.builds(lambda seed, n: random_term(n, ["x", "y", "z"], True, seed=seed),
                     st.integers(0, 10**6), st.integers(1, 14))


def test_parse_show_examples():
    assert show(parse(r"\x. x y")) == r"\x. x y"
    assert parse("x y z") == App(App(Var("x"), Var("y")), Var("z"))
    assert parse("x (y z)") == App(Var("x"), App(Var("y"), Var("z")))
    assert parse("t[t:=u]") == ESub(Var("t"), "t", Var("u"))
    assert parse("λx y. x") == Abs("x", Abs("y", Var("x")))
    assert show(parse(r"(\x. x) y[y:=z]")) == r"(\x. x) y[y:=z]"


def test_parse_error_has_position():
    with pytest.raises(ParseError) as e:
        parse("x (y")
    assert e.value.pos == 4
    with pytest.raises(ParseError):
        parse("x $ y")


def test_prelude_names_expand():
    defs = {"I": parse(r"\x. x")}
    assert parse("I y", defs) == App(Abs("x", Var("x")), Var("y"))


@settings(max_examples=300, deadline=None)
@given(terms_es)
def test_show_parse_roundtrip(t):
    assert parse(show(t)) == t


@settings(max_examples=300, deadline=None)
@given(terms_es, terms_es)
def test_alpha_eq_agrees_with_debruijn(a, b):
    assert alpha_eq(a, b) == (debruijn(a) == debruijn(b))
    assert alpha_eq(a, rename_apart(a))


@settings(max_examples=300, deadline=None)
@given(terms_es, st.integers(0, 10**6))
def test_subst_agrees_with_debruijn(t, seed):
    v = random_value(4, ["x", "y", "w"], seed=seed)
    got = debruijn(subst(t, "x", v))
    assert got == db_subst(debruijn(t), "x", debruijn(v))


def test_subst_avoids_capture():
    t = parse(r"\y. x y")
    r = subst(t, "x", Var("y"))
    assert isinstance(r, Abs) and r.var != "y"
    assert alpha_eq(r, parse(r"\w. y w"))


def test_free_vars_and_size():
    t = parse(r"(\x. x y)[y:=z w]")
    assert t.fv == {"z", "w"}
    assert t.size == 8


def test_fresh_avoids():
    assert fresh("x", {"x", "x1"}) not in {"x", "x1"}


def test_random_term_is_deterministic():
    a = random_term(20, ["x"], True, seed=3)
    b = random_term(20, ["x"], True, rng=random.Random(3))
    assert a == b
    assert a.fv <= {"x"}
