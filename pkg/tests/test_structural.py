import random

import pytest
from hypothesis import given, settings, strategies as st

from nfbisim.prelude import term
from nfbisim.props import check_mirror, check_strong_commutation
from nfbisim.structural import (COM_ONLY, IDENTITY, NET, NONCOM, equiv_class, mirror_by_name,
                                mirror_equiv)
from nfbisim.terms import alpha_key, count_constructors, random_term

es_terms = st.builds(lambda seed, n: random_term(n, ["x", "y", "z"], True, seed=seed),
                     st.integers(0, 10**6), st.integers(1, 12))


def test_presets():
    assert mirror_by_name("net") is NET
    with pytest.raises(ValueError):
        mirror_by_name("nope")


def test_at_r_needs_value_in_noncom():
    assert mirror_equiv(term("(x y)[y:=z]"), term("x y[y:=z]"), NET)
    assert not mirror_equiv(term("(x w y)[y:=z]"), term("x w y[y:=z]"), NONCOM)
    assert mirror_equiv(term("(x y)[y:=z]"), term("x y[y:=z]"), NONCOM)


def test_com_side_conditions():
    a = term("x[x:=y][z:=w]")
    assert mirror_equiv(a, term("x[z:=w][x:=y]"), COM_ONLY)
    # y depends on the outer binder, so they cannot swap
    assert not mirror_equiv(term("x[x:=y][y:=w]"), term("x[y:=w][x:=y]"), COM_ONLY)


def test_identity_class_is_singleton():
    assert len(equiv_class(term("(x y)[y:=z]"), IDENTITY)) == 1


def test_net_class_example():
    cls = equiv_class(term("(x y)[y:=z]"), NET)
    assert len(cls) == 2


def test_lid_is_not_in_net():
    assert not mirror_equiv(term("x[x:=y I]"), term("y I"), NET)


@settings(max_examples=150, deadline=None)
@given(es_terms)
def test_class_is_closed_and_uniform(t):
    cls = equiv_class(t, NET)
    keys = {alpha_key(m) for m in cls}
    assert alpha_key(cls[0]) == alpha_key(t) or len(keys) == len(cls)
    rng = random.Random(t.size)
    u = rng.choice(cls)
    assert {alpha_key(m) for m in equiv_class(u, NET)} == keys
    assert count_constructors(u) == count_constructors(t)
    assert u.fv == t.fv
    assert mirror_equiv(u, t, NET) and mirror_equiv(t, u, NET)


def test_noncom_and_com_are_mirrors():
    assert check_mirror("noncom", 200).passed
    assert check_mirror("com", 200).passed


def test_lid_fails_mirror_properties():
    assert not check_mirror("lid", 200).passed


def test_net_strong_commutation_small():
    assert check_strong_commutation(200, seed=3).passed
