import pytest

from nfbisim.bisim import ENF, NAIVE, NET_SIM, Proven, Refuted, prove_bisimilarity
from nfbisim.laws import (SHORT, Budgets, Law, Rejected, Validated, canonical_instances, expand_es,
                          find_counterexample, fixpoint_suite, formulate, law_by_name,
                          law_instances, run_cell, run_table)
from nfbisim.prelude import term
from nfbisim.results import Converged
from nfbisim.terms import alpha_eq, is_pure
from nfbisim.vsc import big_step_vsc

# expected marks over the whole catalogue; naive refutes every law
EXPECTED = {
    "enf": {Law.MOGGI_LID, Law.MOGGI_ASS, Law.MOGGI_LAD, Law.MOGGI_RAD, Law.PN_AT_L,
            Law.SIGMA_RESTRICTED},
    "net": {Law.OMEGA_V, Law.MOGGI_ASS, Law.PN_AT_L, Law.PN_AT_R, Law.PN_COM,
            Law.SIGMA_RESTRICTED},
    "naive": set(),
    "type": set(Law) - {Law.CBN_DUP, Law.CBN_ERA},
}


def test_law_names():
    assert law_by_name("lid") is Law.MOGGI_LID
    assert law_by_name("PnCom") is Law.PN_COM
    with pytest.raises(ValueError):
        law_by_name("nope")


def test_expand_es():
    assert alpha_eq(expand_es(term("x[x:=y z]")), term(r"(\x. x) (y z)"))
    assert is_pure(expand_es(term("(x y)[y:=z z][x:=w]")))


def test_formulate_redex_laws_for_net():
    a, b = formulate(Law.MOGGI_LID, canonical_instances(Law.MOGGI_LID)[0], NET_SIM)
    assert alpha_eq(a, term("x[x:=y I]"))


@pytest.mark.parametrize("law", list(Law))
def test_instances_are_deterministic(law):
    a = law_instances(law, 10, seed=4)
    b = law_instances(law, 10, seed=4)
    assert a == b
    assert len(a) >= 1


def test_omega_instances_diverge():
    for a, b in canonical_instances(Law.OMEGA_V):
        assert not isinstance(big_step_vsc(a), Converged)
        assert not isinstance(big_step_vsc(b), Converged)


def test_intro_cell_dup_enf():
    cell = run_cell(ENF, Law.CBN_DUP)
    assert isinstance(cell.verdict, Rejected)
    assert cell.mark == "✗"


def test_find_counterexample_for_exrad():
    r = find_counterexample(Law.MOGGI_EXRAD, NET_SIM, 20)
    assert isinstance(r, Rejected)


def test_full_catalogue():
    kinds = ("naive", "enf", "net", "type")
    cells, text = run_table(kinds, tuple(Law), Budgets())
    assert "not a proof" in text
    by = {(c.kind, c.law): c for c in cells}
    sims = {"naive": NAIVE, "enf": ENF, "net": NET_SIM}
    for k in kinds:
        for law in Law:
            cell = by[(k, SHORT[law])]
            want = law in EXPECTED[k]
            assert isinstance(cell.verdict, Validated if want else Rejected), (k, law, cell.verdict)
            if isinstance(cell.verdict, Rejected) and k != "type":
                a, b = cell.verdict.witness
                assert isinstance(prove_bisimilarity(a, b, sims[k]), Refuted)


def test_fixpoint_suite():
    rep = fixpoint_suite()
    assert rep.passed
    assert all(isinstance(v, Proven) for v in rep.proofs.values())
