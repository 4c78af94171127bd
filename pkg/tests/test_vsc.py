import random

from hypothesis import given, settings, strategies as st

from nfbisim import vsc
from nfbisim.prelude import term
from nfbisim.props import check_big_small_vsc, check_diamond
from nfbisim.results import Converged, Diverged
from nfbisim.terms import alpha_eq, random_term, show
from nfbisim.vsc import Kind, NFClass, Omega, big_step_vsc, classify_nf, omega_check, vsc_step

es_terms = st.builds(lambda seed, n: random_term(n, ["x", "y", "z"], True, seed=seed),
                     st.integers(0, 10**6), st.integers(1, 16))


def only(t):
    steps = vsc_step(t)
    assert len(steps) == 1, steps
    return steps[0]


def test_multiplicative_at_a_distance():
    k, u = only(term(r"(\x. x)[y:=z w] v"))
    assert k is Kind.MULT
    assert alpha_eq(u, term("x[x:=v][y:=z w]"))


def test_exponential_at_a_distance():
    k, u = only(term(r"(x x)[x:=(\y. y)[z:=w w]]"))
    assert k is Kind.EXP
    assert alpha_eq(u, term(r"((\y. y) (\y. y))[z:=w w]"))


def test_no_step_on_inert_argument():
    t = term("x[x:=y z]")
    assert vsc_step(t) == []
    assert classify_nf(t) is NFClass.FIREBALL_UNDER_ES
    assert classify_nf(term("y z")) is NFClass.INERT
    assert classify_nf(term("I")) is NFClass.VALUE


def test_omega_l_first_steps():
    t = term("Omega_L")
    expected = ["delta[x:=y z] delta", "(w w)[w:=delta][x:=y z]", "(delta delta)[x:=y z]"]
    kinds = []
    for e in expected:
        k, t = vsc_step(t)[0]
        kinds.append(k.value)
        assert alpha_eq(t, term(e)), show(t)
    assert kinds == ["m", "m", "e"]
    assert isinstance(big_step_vsc(term("Omega_L"), 50), Diverged)


def test_omega_check():
    for name in ("Omega", "Omega_L", "Omega3", "Omega_L3"):
        assert omega_check(term(name)) is Omega.IS_OMEGA
    assert omega_check(term("x x")) is Omega.NOT_OMEGA
    # erasing a diverging argument still diverges under value passing
    assert omega_check(term(r"(\x. y) Omega")) is Omega.IS_OMEGA


def test_dup_does_not_hold():
    k, u = only(term(r"(\x. y x x) (z w)"))
    assert alpha_eq(u, term("(y x x)[x:=z w]"))
    assert vsc_step(u) == []


def test_normal_forms_match_grammar():
    rng = random.Random(1)
    for _ in range(300):
        t = random_term(14, ["x", "y"], True, rng=rng)
        r = vsc.normalize(t, 200)
        if isinstance(r, Converged):
            assert vsc.is_normal(r.nf)
            assert vsc.in_nf_grammar(vsc.sigma_l_canonical(r.nf))


@settings(max_examples=200, deadline=None)
@given(es_terms)
def test_is_normal_iff_no_step(t):
    assert vsc.is_normal(t) == (vsc_step(t) == [])


@settings(max_examples=200, deadline=None)
@given(es_terms)
def test_divergence_verdict_is_sound(t):
    big = big_step_vsc(t, 200)
    small = vsc.normalize(t, 400)
    if isinstance(big, Diverged):
        assert not isinstance(small, Converged)
    if isinstance(big, Converged):
        assert isinstance(small, Converged) and small.steps == big.steps


def test_diamond_small_sample():
    assert check_diamond(200, seed=7).passed


def test_big_small_small_sample():
    assert check_big_small_vsc(200, seed=7).passed
