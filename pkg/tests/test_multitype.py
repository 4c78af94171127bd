import functools

import pytest
from hypothesis import given, settings, strategies as st

from nfbisim.multitype import (EMPTY, Arrow, ConsistentUpToBound, Counterexample, Derivation,
                               Invalid, Multi, Valid, check_derivation, derivation_transfer_check,
                               derive, infer, linear_types, parse_judgment, parse_type,
                               subject_invariance_test, type_preorder_check)
from nfbisim.prelude import default_defs, term
from nfbisim.results import Converged
from nfbisim.terms import random_term
from nfbisim.vsc import big_step_vsc

ID = Arrow(EMPTY, EMPTY)


def brute_linear(n):
    # independent count: linear types as nested tuples with exactly n arrows
    @functools.cache
    def lin(k):
        out = set()
        for d in range(k):
            for a in multis(d):
                for b in multis(k - 1 - d):
                    out.add((a, b))
        return frozenset(out)

    @functools.cache
    def multis(k):
        if k == 0:
            return frozenset({()})
        out = set()
        for first in range(1, k + 1):
            for L in lin(first):
                for rest in multis(k - first):
                    out.add(tuple(sorted((L,) + rest, key=repr)))
        return frozenset(out)

    return len(lin(n))


def test_linear_type_universe():
    assert [str(L) for L in linear_types(1)] == ["[] -o []"]
    assert len(linear_types(2)) == 3
    for n in (3, 4):
        assert len(linear_types(n)) - len(linear_types(n - 1)) == brute_linear(n)


def test_type_syntax_roundtrip():
    for text in ("[]", "[[] -o []]", "[[] -o [], [[] -o []] -o []]", "[] -o [[] -o []]"):
        assert str(parse_type(text)) == text


def test_judgment_parse():
    ctx, t, M = parse_judgment("x:[[] -o []] |- x I : []", default_defs())
    assert ctx == (("x", Multi((ID,))),)
    assert M == EMPTY


def test_value_gets_empty_type_for_free():
    js = infer(term("I"), 4)
    assert str(js[0]) == "|- \\x. x : []"
    assert js[0].derivation.size == 0


def test_app_judgment():
    ctx, t, M = parse_judgment("x:[[] -o []] |- x I : []", default_defs())
    d = derive(ctx, t, M)
    assert d is not None and d.size == 2
    assert isinstance(check_derivation(d), Valid)


def test_bogus_derivation_rejected():
    bad = Derivation("ax", (("x", Multi((ID, ID))),), term("x"), ID)
    assert isinstance(check_derivation(bad), Invalid)
    bad = Derivation("lam", (), term("I"), Arrow(EMPTY, Multi((ID,))), (
        Derivation("many", (), term("x"), EMPTY),))
    assert isinstance(check_derivation(bad), Invalid)


@pytest.mark.parametrize("name", ["Omega", "Omega_L", "Omega3"])
def test_omega_terms_untypable(name):
    assert infer(term(name), 12) == []


def test_dup_is_not_type_sound():
    r = type_preorder_check(term(r"(\x. y x x) (z w)"), term("y (z w) (z w)"))
    assert isinstance(r, Counterexample)
    r = type_preorder_check(term("y (z w) (z w)"), term(r"(\x. y x x) (z w)"))
    assert isinstance(r, Counterexample)


def test_eta_v_both_ways():
    for a, b in (("x", r"\y. x y"), (r"\y. x y", "x")):
        assert isinstance(type_preorder_check(term(a), term(b), 8), ConsistentUpToBound)


def test_transfer_on_proof_relation():
    rep = derivation_transfer_check([(term("I (x x)"), term("x x")), (term("I z"), term("z"))], 8)
    assert rep.passed and rep.judgments > 0


es = st.builds(lambda seed, n: random_term(n, ["x", "y"], True, seed=seed),
               st.integers(0, 10**6), st.integers(1, 8))


@settings(max_examples=120, deadline=None)
@given(es)
def test_inferred_derivations_check(t):
    for j in infer(t, 6):
        assert isinstance(check_derivation(j.derivation), Valid)
        assert j.derivation.size <= 6
        assert j.derivation.subject == t


@settings(max_examples=120, deadline=None)
@given(es)
def test_typable_terms_converge(t):
    if infer(t, 6):
        assert isinstance(big_step_vsc(t, 500), Converged)


def test_subject_invariance_small():
    rep = subject_invariance_test(60, 100, 6, seed=11)
    assert rep.passed, rep.failures
    assert rep.steps_checked > 0
