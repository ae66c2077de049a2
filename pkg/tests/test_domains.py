from __future__ import annotations

import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bohrlab.domains import (
    INF,
    LqBall,
    OptimizerConfig,
    Posynomial,
    conjugate,
    lq_norm,
    monomial_sup,
    norm_compare,
    parse_q,
    posynomial_sup,
    s_ratio,
)
from bohrlab.series import multi_indices


def _sphere_grid(n: int, q: float, m: int = 401) -> np.ndarray:
    """Nonnegative points of the unit l_q sphere on an angle grid."""
    t = np.linspace(0.0, math.pi / 2, m)
    if n == 2:
        c, s = np.cos(t), np.sin(t)
        pts = np.stack([c, s], axis=1)
    else:
        a, b = np.meshgrid(t, t, indexing="ij")
        pts = np.stack([np.cos(a), np.sin(a) * np.cos(b), np.sin(a) * np.sin(b)], axis=-1).reshape(-1, 3)
    pts = np.abs(pts)
    return pts / (np.sum(pts**q, axis=1) ** (1.0 / q))[:, None]


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("q", [1.0, 2.0, 3.0])
def test_monomial_sup_vs_grid(n, q):
    grid = _sphere_grid(n, q, 401 if n == 2 else 201)
    for k in range(1, 7):
        for alpha in multi_indices(n, k):
            brute = float(np.max(np.prod(grid ** np.array(alpha), axis=1)))
            assert abs(monomial_sup(alpha, q) - brute) <= 1e-4, (alpha, q)


def test_monomial_sup_examples():
    assert monomial_sup((1, 1), 2) == pytest.approx(0.5)
    assert monomial_sup((1, 1), 1) == pytest.approx(0.25)
    assert monomial_sup((3, 0), 2) == 1.0
    assert monomial_sup((2, 5), INF) == 1.0
    with pytest.raises(ValueError):
        monomial_sup((0, 0), 2)


def test_parse_and_conjugate():
    assert parse_q("inf") == INF
    assert parse_q(2) == 2.0
    with pytest.raises(ValueError):
        parse_q(0.5)
    assert conjugate(1) == INF and conjugate(INF) == 1 and conjugate(2) == 2
    assert conjugate(3) == pytest.approx(1.5)


def test_lq_norm():
    assert lq_norm([3, 4], 2) == pytest.approx(5)
    assert lq_norm([3, -4], INF) == 4
    assert lq_norm([1, 1, 1], 1) == 3


@pytest.mark.parametrize(
    "qf,qt,n,want",
    [(1, 2, 4, 1.0), (2, 1, 4, 2.0), (INF, 1, 3, 3.0), (INF, 2, 4, 2.0), (2, 2, 5, 1.0)],
)
def test_s_ratio(qf, qt, n, want):
    assert s_ratio(qf, qt, n) == pytest.approx(want)


def test_norm_compare_examples():
    assert norm_compare([1, 1, 1], 2) == pytest.approx(1.0)
    assert norm_compare([1, 0], 2) == pytest.approx(1 / math.sqrt(2))
    assert norm_compare([3, 4], 2) == pytest.approx(7 / (math.sqrt(2) * 5))
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        assert norm_compare([0, 0], 2) == 1.0
        assert any(issubclass(x.category, RuntimeWarning) for x in w)


@settings(max_examples=50, deadline=None)
@given(
    st.lists(st.floats(0, 10), min_size=1, max_size=6),
    st.sampled_from([1.0, 1.5, 2.0, 4.0, INF]),
)
def test_norm_compare_in_unit_interval(r, s):
    if sum(r) == 0:
        return
    v = norm_compare(r, s)
    assert 0 < v <= 1.0


def test_ball_validation():
    b = LqBall(3, "inf")
    assert b.is_polydisc and b.q_label == "inf"
    assert LqBall(2, 2, 1.0).scaled(2.0).scale == 2.0
    with pytest.raises(ValueError):
        LqBall(0)
    with pytest.raises(ValueError):
        LqBall(2, 2, 0.0)


def _random_posy(rng, n, terms=5):
    coef = rng.uniform(0.1, 2.0, size=terms)
    expo = rng.integers(0, 4, size=(terms, n)).astype(float)
    expo[expo.sum(axis=1) == 0, 0] = 1.0
    return Posynomial(coef, expo)


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("q", [1.0, 2.0, 3.0])
def test_posynomial_sup_dominates_samples(n, q):
    rng = np.random.default_rng(7)
    ball = LqBall(n, q)
    for _ in range(3):
        g = _random_posy(rng, n)
        res = posynomial_sup(g, ball)
        x = np.abs(rng.normal(size=(1000, n)))
        x /= (np.sum(x**q, axis=1) ** (1 / q))[:, None]
        assert res.value >= float(np.max(g(x))) - 1e-12
        assert lq_norm(res.x, q) == pytest.approx(1.0, abs=1e-9)
        assert g(res.x) == pytest.approx(res.value, rel=1e-12)


def test_posynomial_sup_monotone_in_scale():
    rng = np.random.default_rng(3)
    g = _random_posy(rng, 3)
    vals = [posynomial_sup(g, LqBall(3, 2.0, s)).value for s in (0.2, 0.4, 0.8, 1.0)]
    assert all(a <= b for a, b in zip(vals, vals[1:]))


def test_posynomial_sup_known_values():
    # x1 x2 on the l2 sphere peaks at 1/2, on the l1 sphere at 1/4
    g = Posynomial.from_terms([(1.0, (1, 1))])
    assert posynomial_sup(g, LqBall(2, 2.0)).value == pytest.approx(0.5, abs=1e-10)
    assert posynomial_sup(g, LqBall(2, 1.0)).value == pytest.approx(0.25, abs=1e-10)
    assert posynomial_sup(g, LqBall(2, INF, 0.5)).value == pytest.approx(0.25)
    # linear form on l2 is the dual norm
    h = Posynomial.from_terms([(3.0, (1, 0)), (4.0, (0, 1))])
    assert posynomial_sup(h, LqBall(2, 2.0)).value == pytest.approx(5.0, abs=1e-9)


def test_posynomial_sup_deterministic():
    rng = np.random.default_rng(11)
    g = _random_posy(rng, 3, 8)
    cfg = OptimizerConfig(seed=4)
    a = posynomial_sup(g, LqBall(3, 1.5), cfg)
    b = posynomial_sup(g, LqBall(3, 1.5), cfg)
    assert a.value == b.value and np.array_equal(a.x, b.x)


def test_posynomial_validation():
    with pytest.raises(ValueError):
        Posynomial(np.array([-1.0]), np.array([[1.0]]))
    with pytest.raises(ValueError):
        posynomial_sup(Posynomial.from_terms([(1.0, (1, 0))]), LqBall(3, 2.0))
