from __future__ import annotations

import math

import numpy as np
import pytest

from bohrlab.domains import INF, LqBall, conjugate, lq_norm
from bohrlab.family import (
    TailModel,
    TestBattery,
    axis_extremal,
    cayley_linear,
    default_K,
    halfplane_extremal,
    homogeneous_battery,
    homogeneous_member,
    mean_compose,
    power_sum_compose,
    random_battery,
    random_member,
    regenerate,
    rescaled_battery,
    structured_members,
)
from bohrlab.series import TruncatedSeries, multi_indices, power


def _compose(ck, inner: TruncatedSeries, K: int) -> TruncatedSeries:
    """``sum_k ck[k] inner^k`` by direct series arithmetic."""
    out = TruncatedSeries(inner.n, K)
    for k, c in enumerate(ck):
        if c:
            out = out + power(inner, k, K).scale(c)
    return out


def _max_diff(a: TruncatedSeries, b: TruncatedSeries) -> float:
    keys = {tuple(x) for x, _ in a} | {tuple(x) for x, _ in b}
    return max((abs(a[k] - b[k]) for k in keys), default=0.0)


def test_halfplane_extremal_coefficients():
    f = halfplane_extremal(1.0, 8)
    assert f.series[(0,)] == 1
    assert all(f.series[(k,)] == 2 for k in range(1, 9))
    g = halfplane_extremal(1j, 4)
    assert g.series[(1,)] == pytest.approx(2j)
    assert g.series[(2,)] == pytest.approx(-2)
    with pytest.raises(ValueError):
        halfplane_extremal(1.5, 4)


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("q", [1, 2, 3])
def test_power_sum_formula_vs_expansion(n, q):
    K = 6
    f1 = halfplane_extremal(0.7 - 0.2j, K)
    got = power_sum_compose(f1, q, n, K)
    inner = TruncatedSeries(n, K, {tuple(q if i == j else 0 for i in range(n)): 1.0 for j in range(n)} if q <= K else {})
    ck = [f1.series[(k,)] for k in range(K + 1)]
    want = _compose(ck, inner, K)
    assert _max_diff(got.series, want) <= 1e-12


@pytest.mark.parametrize("n", [1, 2, 3])
def test_mean_formula_vs_expansion(n):
    K = 6
    f1 = halfplane_extremal(-0.9, K)
    got = mean_compose(f1, n, K, scale=1.3)
    inner = TruncatedSeries.linear([1.0 / (n * 1.3)] * n, K)
    ck = [f1.series[(k,)] for k in range(K + 1)]
    assert _max_diff(got.series, _compose(ck, inner, K)) <= 1e-12


@pytest.mark.parametrize("n", [2, 3, 4])
def test_mean_compose_mass(n):
    # sum over |alpha| = k of c_alpha equals c_k / scale^k: the diagonal restriction
    K = 8
    f1 = halfplane_extremal(1.0, K)
    h = mean_compose(f1, n, K)
    for k in range(K + 1):
        mass = sum(h.series[a] for a in multi_indices(n, k))
        assert mass == pytest.approx(f1.series[(k,)], abs=1e-12)


def test_power_sum_rejects_fractional_q():
    with pytest.raises(ValueError):
        power_sum_compose(halfplane_extremal(1.0, 4), 1.5, 2, 4)


def test_cayley_linear_admissibility():
    ball = LqBall(2, 2.0)
    f = cayley_linear([0.6, 0.8], ball, 5)
    assert f.series.constant_term == 1
    with pytest.raises(ValueError):
        cayley_linear([0.9, 0.9], ball, 5)
    # polydisc dual is l1
    with pytest.raises(ValueError):
        cayley_linear([0.6, 0.6], LqBall(2, INF), 5)


def test_axis_extremal_is_one_variable():
    f = axis_extremal(LqBall(3, 2.0), 1, 6)
    for a, c in f.series:
        assert a[0] == 0 and a[2] == 0
        if a.order:
            assert c == 2


def test_random_member_deterministic_and_admissible():
    ball = LqBall(3, 1.5)
    a = random_member(ball, 6, 5, 2)
    b = random_member(ball, 6, 5, 2)
    assert a.series == b.series
    w = np.array([complex(*x) for x in a.params["w"]])
    assert 0.7 - 1e-12 <= lq_norm(w, conjugate(1.5)) <= 1.0 + 1e-12
    assert random_member(ball, 6, 5, 3).series != a.series


def test_battery_order_and_size():
    ball = LqBall(2, 2.0)
    bat = random_battery(ball, seed=1)
    prov = [f.provenance for f in bat]
    assert prov[:4] == ["extremal", "extremal", "power_sum_compose", "mean_compose"]
    assert prov[4:] == ["random"] * 8
    assert len(random_battery(ball, size=2)) == 2
    assert len(random_battery(ball, size=20)) == 20
    assert bat.K == default_K(2) == 12
    assert default_K(1) == 30


def test_structured_members_skip_power_sum_when_degenerate():
    assert [f.provenance for f in structured_members(LqBall(2, INF), 4)] == ["extremal", "extremal", "mean_compose"]
    assert [f.provenance for f in structured_members(LqBall(1, 1.0), 4)] == ["extremal"]


def test_battery_validation():
    ball = LqBall(2, 2.0)
    f3 = axis_extremal(LqBall(3, 2.0), 0, 4)
    with pytest.raises(ValueError):
        TestBattery((f3,), ball, 4)
    with pytest.raises(ValueError):
        TestBattery((), ball, 4)


def test_manifest_regenerates_identically():
    ball = LqBall(2, 3.0)
    bat = random_battery(ball, seed=9)
    for f, desc in zip(bat, bat.manifest()["members"]):
        g = regenerate(desc)
        assert g.series == f.series
        assert g.tail_model == f.tail_model


def test_homogeneous_members():
    f = random_member(LqBall(2, 2.0), 6, 0, 0)
    parts = [homogeneous_member(f, m) for m in range(1, 7)]
    assert all(p.series.constant_term == 0 for p in parts)
    total = TruncatedSeries.constant(2, 6)
    for p in parts:
        total = total + p.series
    assert total == f.series
    bat = TestBattery((f,), LqBall(2, 2.0), 6)
    assert len(homogeneous_battery(bat)) == 6
    assert regenerate(parts[2].descriptor()).series == parts[2].series


def test_test_function_rejects_bad_constant():
    from bohrlab.family import TestFunction

    with pytest.raises(ValueError):
        TestFunction(TruncatedSeries.constant(1, 3, 2.0), "random", {})


def test_rescaled_battery_matches_substitution():
    ball = LqBall(2, 2.0)
    bat = random_battery(ball, seed=2, K=5)
    t = 2.0
    scaled = rescaled_battery(bat, t)
    assert scaled.domain.scale == t
    for f, g in zip(bat, scaled):
        for a, c in f.series:
            assert g.series[a] == pytest.approx(c / t**a.order, abs=1e-12)


def test_tail_model_bound_dominates_dropped_blocks():
    # extremal: block_k = 2^p |zeta r|^{pk}; the bound past K is exact
    tm = TailModel(0.8, (1.0,), 1, 5)
    p, r = 1.5, 0.6
    rho = tm.rho(np.array([r]))
    dropped = sum(2**p * (0.8 * r) ** (p * k) for k in range(6, 400))
    assert tm.tail(p, rho) == pytest.approx(dropped, rel=1e-10)
    assert tm.tail(p, 1 / 0.8) == math.inf


def test_rho_sup_matches_sphere_maximum():
    tm = TailModel(1.0, (0.5, 0.25, 1.0), 1, 4)
    ball = LqBall(3, 2.0, 0.7)
    rng = np.random.default_rng(0)
    x = np.abs(rng.normal(size=(20000, 3)))
    x = 0.7 * x / np.linalg.norm(x, axis=1)[:, None]
    brute = max(tm.rho(row) for row in x)
    assert brute <= tm.rho_sup(ball) + 1e-12
    assert tm.rho_sup(ball) == pytest.approx(0.7 * math.sqrt(0.25 + 0.0625 + 1.0))
