import random

import pytest
from hypothesis import given, settings, strategies as st

from nfbisim.bisim import (CBN, ENF, NAIVE, NET_SIM, RENF, Invalid, Proven, Refuted, Unknown,
                           Valid, check_simulation, evaluate, parse_relation,
                           prove_bisimilarity, prove_similarity, sim_by_name)
from nfbisim.laws import NAIVE_FIX_RELATION, witness_cases, run_witness_case
from nfbisim.prelude import default_defs, term
from nfbisim.results import Converged, Diverged
from nfbisim.terms import random_term


@pytest.mark.parametrize("case", witness_cases(), ids=lambda c: c.label)
def test_witness(case):
    run_witness_case(case)
    assert case.ok, case.verdict


def test_proof_relation_is_a_simulation():
    for sim, a, b in ((ENF, "I (x x)", "x x"), (NET_SIM, "Omega", "Omega_L"),
                      (NAIVE, "Y_v", "Theta_v"), (NET_SIM, "Y_v", "Theta_v")):
        v = prove_bisimilarity(term(a), term(b), sim)
        assert isinstance(v, Proven)
        assert isinstance(check_simulation(v.relation, sim), Valid)
        assert isinstance(check_simulation(v.converse, sim), Valid)


def test_refutation_reports_pair():
    v = prove_bisimilarity(term("x[x:=y I]"), term("y I"), NET_SIM)
    assert isinstance(v, Refuted)
    assert v.diagnosis
    rec = v.to_record()
    assert rec["verdict"] == "refuted" and len(rec["pair"]) == 2


def test_budget_gives_unknown():
    v = prove_bisimilarity(term("Y_v"), term("Theta_v"), NAIVE, budget=1)
    assert isinstance(v, Unknown)


def test_sim_by_name():
    assert sim_by_name("net") is NET_SIM
    assert sim_by_name("nafex", "net") == NET_SIM
    assert sim_by_name("renf") == RENF
    with pytest.raises(ValueError):
        sim_by_name("bogus")


def test_plotkin_kinds_reject_es():
    with pytest.raises(ValueError):
        evaluate(term("x[x:=y]"), ENF, 10)


def test_cbn_validates_dup():
    v = prove_bisimilarity(term(r"(\x. y x x) (z w)"), term("y (z w) (z w)"), CBN)
    assert isinstance(v, Proven)


def test_fixpoint_relation():
    rel = parse_relation(NAIVE_FIX_RELATION, default_defs())
    assert len(rel.pairs) == 7
    assert rel.schematic == ("x", "y")
    assert isinstance(check_simulation(rel, NAIVE), Valid)


def test_incomplete_relation_is_invalid():
    rel = parse_relation("Y_v ~ Theta_v\n", default_defs())
    r = check_simulation(rel, NAIVE)
    assert isinstance(r, Invalid)


def test_bad_relation_line():
    with pytest.raises(ValueError):
        parse_relation("x y\n")


pure = st.builds(lambda seed, n: random_term(n, ["x", "y"], False, seed=seed),
                 st.integers(0, 10**6), st.integers(1, 10))
es = st.builds(lambda seed, n: random_term(n, ["x", "y"], True, seed=seed),
               st.integers(0, 10**6), st.integers(1, 10))


@settings(max_examples=100, deadline=None)
@given(pure, st.sampled_from([NAIVE, ENF, RENF, CBN]))
def test_reflexive(t, sim):
    assert not isinstance(prove_similarity(t, t, sim, 200, 500), Refuted)


@settings(max_examples=100, deadline=None)
@given(es)
def test_net_reflexive(t):
    assert not isinstance(prove_similarity(t, t, NET_SIM, 200, 500), Refuted)


@settings(max_examples=100, deadline=None)
@given(pure, pure)
def test_proven_pairs_agree_on_convergence(t, u):
    for sim in (NAIVE, ENF):
        v = prove_bisimilarity(t, u, sim, 200, 500)
        if isinstance(v, Proven):
            a, b = evaluate(t, sim, 200), evaluate(u, sim, 200)
            assert isinstance(a, Converged) == isinstance(b, Converged) or not (
                isinstance(a, (Converged, Diverged)) and isinstance(b, (Converged, Diverged)))
            assert isinstance(check_simulation(v.relation, sim, 200), Valid)
