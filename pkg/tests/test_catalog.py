from __future__ import annotations

import math

import numpy as np
import pytest

from bohrlab import catalog
from bohrlab.domains import INF


@pytest.mark.parametrize(
    "p,want",
    [(1, 1 / 3), (2, math.sqrt(3 / 7)), (3, (7 / 15) ** (1 / 3)), (1.5, ((2**1.5 - 1) / (2**2.5 - 1)) ** (1 / 1.5))],
)
def test_closed_form(p, want):
    assert catalog.h1p_closed_form(p) == pytest.approx(want, rel=1e-15)


def test_closed_form_increasing_towards_half():
    ps = np.linspace(1, 40, 200)
    vals = [catalog.h1p_closed_form(p) for p in ps]
    assert all(a < b for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 1.0
    with pytest.raises(ValueError):
        catalog.h1p_closed_form(0)


def test_das_polydisc_kinds():
    rec = catalog.das_polydisc(2, 3)
    assert rec.kind == "exact" and rec.value == pytest.approx(math.sqrt(3 / 7))
    low = catalog.das_polydisc(1.5, 10)
    assert low.kind == "asymptotic"
    with pytest.raises(ValueError):
        catalog.das_polydisc(2, 1)


def test_kn_bounds_selection():
    assert set(catalog.kn_bounds(4, INF)) == {"boas_khavinson_polydisc", "boas_q_from_2"}
    assert set(catalog.kn_bounds(4, 1)) == {"aizenberg_l1", "boas_q_below_2"}
    assert set(catalog.kn_bounds(4, 3)) == {"boas_q_from_2"}
    with_c = catalog.kn_bounds(100, 2, c=1.0)
    assert with_c["defant_frerick_log"][1] is None
    assert "defant_frerick_log" not in catalog.kn_bounds(2, 2, c=1.0)
    lo, hi = catalog.kn_bounds(4, INF)["boas_khavinson_polydisc"]
    assert lo.value == pytest.approx(1 / 6) and hi.value == pytest.approx(2 * math.sqrt(math.log(4) / 4))


@pytest.mark.parametrize("n", range(1, 7))
def test_l1_pinch(n):
    lo, hi = catalog.radius_sandwich(1, 1, n)
    assert lo.value == hi.value == 1 / 3
    assert catalog.l1_pinch(n).value == 1 / 3


@pytest.mark.parametrize("p", [1, 1.5, 2, 3])
@pytest.mark.parametrize("q", [1, 2, 4])
@pytest.mark.parametrize("n", range(1, 7))
def test_sandwich_ordering(p, q, n):
    for lo, hi in (catalog.arith_sandwich(p, q, n), catalog.radius_sandwich(p, q, n), catalog.polydisc_arith_bounds(p, n)):
        assert lo.value <= hi.value
        assert lo.kind == "lower" and hi.kind == "upper"


def test_sandwich_examples():
    lo, hi = catalog.arith_sandwich(1, 2, 2)
    assert lo.value == pytest.approx(1 / 6)
    assert hi.value == pytest.approx(math.sqrt(1 / 6))
    lo, hi = catalog.radius_sandwich(1, 2, 2)
    assert lo.value == pytest.approx(1 / (3 * math.sqrt(2)))
    assert hi.value == pytest.approx(math.sqrt(1 / 3))
    lo, hi = catalog.polydisc_arith_bounds(1, 3)
    assert (lo.value, hi.value) == pytest.approx((1 / 9, 1 / 3))


def test_exact_relation():
    assert catalog.arith_from_radius(1 / 3, 3, 1) == pytest.approx(1 / 9)
    assert catalog.arith_from_radius(0.5, 4, 2) == pytest.approx(0.25)
    assert catalog.arith_from_radius(0.5, 4, INF) == 0.5


def test_bounds_monotone_in_p():
    ps = np.linspace(1, 6, 30)
    for n in (2, 5):
        los = [catalog.polydisc_arith_bounds(p, n)[0].value for p in ps]
        assert all(a <= b for a, b in zip(los, los[1:]))


def test_records_validate_and_serialize():
    rec = catalog.radius_sandwich(1, 2, 3)[1]
    js = rec.to_json()
    assert js["kind"] == "upper" and isinstance(js["tags"], list)
    with pytest.raises(ValueError):
        catalog.BoundRecord("x", "guess", 1.0, "", "")
    with pytest.raises(ValueError):
        catalog.arith_sandwich(1, INF, 2)
    with pytest.raises(ValueError):
        catalog.arith_sandwich(0.5, 2, 2)


def test_radius_bounds_dispatch():
    assert [r.kind for r in catalog.radius_bounds(2, INF, 1)] == ["exact"]
    assert [r.kind for r in catalog.radius_bounds(2, INF, 3)] == ["exact", "lower", "upper"]
    assert [r.kind for r in catalog.radius_bounds(1, INF, 3)] == ["lower", "upper"]
    assert [r.kind for r in catalog.radius_bounds(1, 2, 3)] == ["lower", "upper"]


def test_documented_grid_points():
    assert [r.value for r in catalog.arith_sandwich(1, 1, 2)] == pytest.approx([1 / 6, 1 / 6])
    assert [r.value for r in catalog.arith_sandwich(1, 2, 4)] == pytest.approx([1 / 12, math.sqrt(1 / 12)])
    H = catalog.h1p_closed_form(2)
    assert [r.value for r in catalog.arith_sandwich(2, 3, 1)] == pytest.approx([H, H ** (1 / 3)])
    # derived exponent form: upper (H / n^(1/p - 1))^(1/q) = (1/3)^(1/2) at p=1, q=2, n=4
    assert [r.value for r in catalog.radius_sandwich(1, 2, 4)] == pytest.approx([1 / 6, math.sqrt(1 / 3)])
