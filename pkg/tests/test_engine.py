from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bohrlab import catalog
from bohrlab.domains import INF, LqBall
from bohrlab.engine import (
    ArithConfig,
    BohrParams,
    arith_bohr_estimate,
    bohr_sum_domain,
    bohr_sum_vector,
    class_sup,
    max_homogeneous_radius,
    homogeneous_scale_check,
    radius_solve,
)
from bohrlab.family import TestBattery, axis_extremal, halfplane_extremal, random_battery, rescaled_battery


def _disc(K=30):
    return TestBattery((halfplane_extremal(1.0, K),), LqBall(1), K)


@pytest.mark.parametrize("p,want", [(1.0, 1 / 3), (2.0, math.sqrt(3 / 7))])
def test_one_dimensional_radius(p, want):
    ri = radius_solve(_disc(), BohrParams(p))
    assert ri.contains(want, 1e-9)
    assert ri.width <= 1e-9
    assert ri.witness == 0


def test_extremal_sum_closed_form():
    # (1/2)(1 + 2^p r^p / (1 - r^p))^(1/p) for the disc extremal
    f = halfplane_extremal(1.0, 30)
    for p in (1.0, 2.0, 3.0):
        for r in (0.1, 0.3, 0.5):
            want = 0.5 * (1 + 2**p * r**p / (1 - r**p)) ** (1 / p)
            assert bohr_sum_vector(f, BohrParams(p), [r]) == pytest.approx(want, rel=1e-12)


def test_report_K_policy_drops_tail():
    f = halfplane_extremal(1.0, 5)
    full = bohr_sum_vector(f, BohrParams(1.0), [0.5])
    trunc = bohr_sum_vector(f, BohrParams(1.0, "report_K"), [0.5])
    assert trunc < full
    assert trunc == pytest.approx(0.5 * (1 + 2 * sum(0.5**k for k in range(1, 6))))


def test_params_validation():
    with pytest.raises(ValueError):
        BohrParams(0.5)
    with pytest.raises(ValueError):
        BohrParams(1.0, "nope")
    assert BohrParams(2.0).budget_base == 4.0


def test_sum_at_origin_is_half():
    bat = random_battery(LqBall(3, 2.0), K=6)
    for f in bat:
        assert bohr_sum_vector(f, BohrParams(1.5), np.zeros(3)) == 0.5
        assert bohr_sum_domain(f, BohrParams(1.5), 0.0, bat.domain).value == 0.5


@settings(max_examples=30, deadline=None)
@given(
    st.lists(st.floats(0, 0.3), min_size=2, max_size=2),
    st.lists(st.floats(0, 0.05), min_size=2, max_size=2),
    st.sampled_from([1.0, 1.5, 2.0]),
)
def test_vector_sum_monotone(r, dr, p):
    bat = random_battery(LqBall(2, 2.0), K=8)
    r = np.array(r)
    for f in bat:
        assert bohr_sum_vector(f, BohrParams(p), r) <= bohr_sum_vector(f, BohrParams(p), r + np.array(dr)) + 1e-15


def test_class_sup_monotone_in_radius():
    bat = random_battery(LqBall(2, 1.0), K=8)
    vals = [class_sup(bat, BohrParams(1.0), r).value for r in np.linspace(0, 0.4, 9)]
    assert vals[0] == 0.5
    assert all(a <= b + 1e-15 for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("p", [2.0, 3.0])
def test_polydisc_value_binds(n, p):
    bat = random_battery(LqBall(n, INF))
    r = catalog.das_polydisc(p, n).value
    cs = class_sup(bat, BohrParams(p), r)
    assert cs.value <= 1 + 1e-8
    assert abs(cs.values[0] - 1.0) <= 1e-8


def test_l1_radius_pinch():
    bat = random_battery(LqBall(3, 1.0))
    ri = radius_solve(bat, BohrParams(1.0))
    assert ri.lo >= 1 / 3 - 1e-5
    assert ri.contains(1 / 3, 1e-6)
    assert ri.inconsistencies(1e-6) == []


def test_radius_bracket_semantics():
    bat = random_battery(LqBall(2, 2.0), K=8)
    params = BohrParams(1.5)
    ri = radius_solve(bat, params)
    assert class_sup(bat, params, ri.lo).value <= 1.0
    assert class_sup(bat, params, ri.hi).value > 1.0
    assert ri.width <= 1e-6
    assert ri.bound_kind == "upper_estimate"


def test_radius_scales_with_domain():
    bat = random_battery(LqBall(2, 2.0), K=8)
    params = BohrParams(1.0)
    base = radius_solve(bat, params).mid
    big = radius_solve(rescaled_battery(bat, 2.0), params)
    assert big.mid == pytest.approx(2 * base, abs=3e-6)


def test_more_members_never_raise_radius():
    ball = LqBall(2, 2.0)
    params = BohrParams(1.0)
    small = random_battery(ball, size=2, K=8)
    big = random_battery(ball, size=12, K=8)
    assert radius_solve(big, params).lo <= radius_solve(small, params).lo + 1e-12


def test_arith_one_dimensional():
    est = arith_bohr_estimate(_disc(), BohrParams(1.0))
    assert est.value == pytest.approx(1 / 3, abs=1e-9)


@pytest.mark.parametrize("n", [2, 3])
def test_arith_l1_matches_relation(n):
    bat = random_battery(LqBall(n, 1.0))
    est = arith_bohr_estimate(bat, BohrParams(1.0))
    assert est.value == pytest.approx(1 / (3 * n), abs=1e-6)
    assert np.all(est.r_vec >= 0)
    assert "unconstrained" not in est.flags


def test_arith_unconstrained_flag():
    ball = LqBall(2, 2.0)
    bat = TestBattery((axis_extremal(ball, 0, 8),), ball, 8)
    est = arith_bohr_estimate(bat, BohrParams(1.0))
    assert "unconstrained" in est.flags


def test_arith_scaling_and_determinism():
    bat = random_battery(LqBall(2, 2.0), K=8)
    params = BohrParams(1.0)
    a = arith_bohr_estimate(bat, params, ArithConfig(seed=3))
    b = arith_bohr_estimate(bat, params, ArithConfig(seed=3))
    assert a.value == b.value
    half = arith_bohr_estimate(rescaled_battery(bat, 0.5), params, ArithConfig(seed=3))
    assert half.value == pytest.approx(0.5 * a.value, abs=1e-6)


@pytest.mark.parametrize("p", [1.0, 2.0])
def test_homogeneous_scaling_check(p):
    bat = random_battery(LqBall(2, 2.0), K=8)
    params = BohrParams(p)
    d = np.array([0.5, 0.5])
    t = max_homogeneous_radius(bat, params, d)
    rep = homogeneous_scale_check(None, 0.99 * t * d, params, bat)
    assert rep.passed and not rep.rejected
    assert rep.slack >= 0
    over = homogeneous_scale_check(None, 1.5 * t * d, params, bat)
    assert over.rejected and not over.passed


def test_homogeneous_scaling_one_dimensional_edge():
    # on the disc every homogeneous block is admissible at r = 1, and r/3 is the radius
    bat = _disc()
    rep = homogeneous_scale_check(None, [1.0], BohrParams(1.0), bat)
    assert rep.passed
    assert rep.slack == pytest.approx(0.0, abs=1e-12)
