import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from optdual import (
    bound_rhs,
    check_sufficient_condition,
    decay_profile,
    lifted_delta,
    relative_error,
    s_term_tail,
    scan_sufficient_condition,
)

from oracles import best_s_term_tail_enum

vectors = arrays(np.float64, st.integers(1, 12),
                 elements=st.floats(-100, 100, allow_nan=False, allow_subnormal=False))


def test_relative_error_cases():
    t = np.array([1.0, -2.0, 3.0])
    assert relative_error(t, t) == 0.0
    assert relative_error(np.zeros(3), t) == 1.0
    assert relative_error(2 * t, t) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        relative_error(t, np.zeros(3))


def test_s_term_tail_examples():
    v = np.array([3.0, 1.0, -2.0])
    assert s_term_tail(v, 3) == 0.0
    assert s_term_tail(v, 1) == 3.0
    assert s_term_tail(v, 2) == best_s_term_tail_enum(v, 2) == 1.0
    assert s_term_tail(v, 0) == 6.0


def test_s_term_tail_complex_magnitudes():
    assert s_term_tail(np.array([3j, 1 + 0j, -2.0]), 1) == pytest.approx(3.0)


def test_s_term_tail_range():
    with pytest.raises(ValueError):
        s_term_tail(np.ones(3), 4)
    with pytest.raises(ValueError):
        s_term_tail(np.ones(3), -1)


@given(v=vectors, data=st.data())
@settings(max_examples=60, deadline=None)
def test_s_term_tail_matches_enumeration(v, data):
    s = data.draw(st.integers(0, min(v.size, 6)))
    assert s_term_tail(v, s) == pytest.approx(best_s_term_tail_enum(v, s), abs=1e-9)


@given(v=vectors)
@settings(max_examples=40, deadline=None)
def test_s_term_tail_non_increasing(v):
    tails = [s_term_tail(v, s) for s in range(v.size + 1)]
    assert tails[0] == pytest.approx(np.abs(v).sum())
    assert all(a >= b for a, b in zip(tails, tails[1:]))


def test_decay_profile_examples():
    np.testing.assert_array_equal(decay_profile(np.zeros(6), 5).magnitudes, np.zeros(5))
    np.testing.assert_array_equal(decay_profile(np.array([1.0, 2.0, 3.0]), 2).magnitudes, [3, 2])
    with pytest.raises(ValueError):
        decay_profile(np.ones(3), 0)
    with pytest.raises(ValueError):
        decay_profile(np.ones(3), 4)


@given(v=vectors, data=st.data())
@settings(max_examples=40, deadline=None)
def test_decay_profile_prefix_consistent(v, data):
    k = data.draw(st.integers(1, v.size))
    j = data.draw(st.integers(1, k))
    full = decay_profile(v, k).magnitudes
    np.testing.assert_array_equal(full[:j], decay_profile(v, j).magnitudes)
    assert np.all(np.diff(full) <= 0) and np.all(full >= 0)


def test_bound_rhs_examples():
    v = np.array([0, 2.0, 0, -1.0, 0])
    assert bound_rhs(0.0, v, 2).rhs == 0.0
    rep = bound_rhs(1.0, v, 2, c0=2.0)
    assert rep.rhs == 2.0 and rep.tail == 0.0
    with pytest.raises(ValueError):
        bound_rhs(0.0, v, 0)


def test_bound_rhs_linear_grid():
    s, c0, c1 = 3, 0.7, 1.9
    base = np.array([5.0, 4.0, 3.0, 0.0, 0.0])
    for eps in (0.0, 0.5):
        for tail in (0.0, 2.5):
            v = np.concatenate([base, [tail]])
            rep = bound_rhs(eps, v, s, c0, c1)
            assert rep.tail == pytest.approx(tail)
            assert rep.rhs == pytest.approx(c0 * eps + c1 * tail / np.sqrt(s))


def test_condition_parseval_rho_one_fails():
    rep = check_sufficient_condition(s=4, a=2, b=4, B=1.0, B_tilde=1.0,
                                     delta_s_plus_a=0.0, delta_b=0.0)
    assert rep.rho == 1.0
    assert rep.rhs == pytest.approx(-1.0)
    assert not rep.satisfied and rep.margin > 0


def test_condition_zero_delta_small_rho_holds():
    rep = check_sufficient_condition(s=1, a=2, b=8, B=1.0, B_tilde=1.0,
                                     delta_s_plus_a=0.0, delta_b=0.0)
    assert rep.rho * rep.B * rep.B_tilde < 0.25
    assert rep.satisfied and rep.margin < 0


def test_condition_literal_value():
    rep = check_sufficient_condition(2, 5, 20, 1.5, 0.5, 0.1, 0.2)
    r = 2 / 20 * 0.75
    assert rep.lhs == pytest.approx((1 - np.sqrt(r)) ** 2 * 0.1 + r * 0.2)
    assert rep.rhs == pytest.approx(1 - 2 * np.sqrt(r))


@pytest.mark.parametrize("a, b", [(2, 2), (2, 1), (2, 9)])
def test_condition_rejects_bad_pairs(a, b):
    with pytest.raises(ValueError):
        check_sufficient_condition(1, a, b, 1.0, 1.0, 0.1, 0.1)


@given(d1=st.floats(0, 0.98), d2=st.floats(0, 0.98), inc=st.floats(0, 0.5),
       a=st.integers(1, 20), gap=st.integers(1, 60), s=st.integers(1, 10),
       BB=st.floats(0.1, 3.0))
@settings(max_examples=200, deadline=None)
def test_condition_monotone_in_delta(d1, d2, inc, a, gap, s, BB):
    b = a + min(gap, 3 * a)
    base = check_sufficient_condition(s, a, b, BB, 1.0, d1, d2)
    up1 = check_sufficient_condition(s, a, b, BB, 1.0, min(d1 + inc, 0.99), d2)
    up2 = check_sufficient_condition(s, a, b, BB, 1.0, d1, min(d2 + inc, 0.99))
    if not base.satisfied:
        assert not up1.satisfied and not up2.satisfied


def test_lifted_delta():
    delta = lifted_delta(0.1, 3)
    assert delta(6) == pytest.approx(0.1)
    assert delta(7) == pytest.approx(0.2)
    assert delta(18) == pytest.approx(0.3)


def test_parseval_scan_direction_small_s():
    assert any(r.satisfied for r in scan_sufficient_condition(2, 1.0, 1.0, 0.13))
    assert not any(r.satisfied for r in scan_sufficient_condition(2, 1.0, 1.0, 0.5))


def test_scan_accepts_callable():
    reps = scan_sufficient_condition(1, 1.0, 1.0, lambda k: 0.0, a_max=3)
    assert {(r.a, r.b) for r in reps} == {(a, b) for a in range(1, 4) for b in range(a + 1, 4 * a + 1)}
