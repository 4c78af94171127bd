import pytest
from hypothesis import given, settings, strategies as st

from nfbisim import plotkin
from nfbisim.plotkin import Split, Strategy, Value, big_step, left_decompose, right_decompose, step
from nfbisim.prelude import term
from nfbisim.results import Converged, Diverged, FuelExhausted
from nfbisim.terms import alpha_eq, random_term

pure = st.builds(lambda seed, n: random_term(n, ["x", "y", "z"], False, seed=seed),
                 st.integers(0, 10**6), st.integers(1, 18))


def test_omega_l_is_weak_normal():
    r = big_step(term("Omega_L"), Strategy.WEAK)
    assert isinstance(r, Converged)
    assert r.steps == 0
    assert alpha_eq(r.nf, term("Omega_L"))


def test_omega_diverges_in_every_strategy():
    for s in Strategy:
        assert isinstance(big_step(term("Omega"), s, 100), Diverged)


def test_identity_application():
    r = big_step(term("I (I y)"), Strategy.WEAK)
    assert r == Converged(2, term("y"))


def test_stuck_redex_blocks():
    # the argument x y is normal but not a value
    t = term(r"(\z. z) (x y)")
    assert step(t, Strategy.WEAK) == []
    assert plotkin.is_normal(t)


def test_left_and_right_differ_on_order():
    t = term(r"(x x) (I y)")
    assert step(t, Strategy.LEFT) == []
    assert step(t, Strategy.RIGHT) == [term("x x y")]


def test_es_rejected():
    with pytest.raises(ValueError):
        step(term("x[x:=y]"))


def test_fuel_exhausted():
    t = term(r"(\f. f f) (\g. g g (\z. z))")
    r = big_step(t, Strategy.WEAK, 3)
    assert isinstance(r, (FuelExhausted, Diverged))


def test_decompose_example():
    d = left_decompose(term("x y (z w)"))
    assert isinstance(d, Split)
    assert (str(d.head), str(d.arg), str(d.ctx)) == ("x", "y", "<.> (z w)")
    d = right_decompose(term("x y (z w)"))
    assert (str(d.head), str(d.arg), str(d.ctx)) == ("z", "w", "x y <.>")
    assert isinstance(left_decompose(term("I")), Value)


@settings(max_examples=300, deadline=None)
@given(pure)
def test_decomposition_plugs_back(t):
    for dec in (left_decompose, right_decompose):
        d = dec(t)
        if isinstance(d, Value):
            assert t.is_value
        else:
            assert d.plug() == t
            assert d.head.is_value and d.arg.is_value


@settings(max_examples=300, deadline=None)
@given(pure)
def test_left_and_right_are_deterministic(t):
    for s in (Strategy.LEFT, Strategy.RIGHT):
        assert len(step(t, s)) <= 1
        # one strategy step is also a weak step
        assert all(u in step(t, Strategy.WEAK) for u in step(t, s))


@settings(max_examples=300, deadline=None)
@given(pure, st.sampled_from(list(Strategy)))
def test_big_step_matches_small_step(t, s):
    small = plotkin.normalize(t, s, 200)
    big = big_step(t, s, 200)
    if isinstance(small, Converged):
        assert isinstance(big, Converged)
        assert big.steps == small.steps
        assert alpha_eq(big.nf, small.nf)
    if isinstance(big, Diverged):
        assert not isinstance(small, Converged)


def test_weak_head_cbn():
    r = plotkin.big_step_head(term(r"(\x. y) Omega"))
    assert r == Converged(1, term("y"))
