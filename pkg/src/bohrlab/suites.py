"""Invariant suites behind ``bohrlab verify``.

Each suite returns a list of rows ``{"suite", "case", "passed", "value", "detail"}``.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from . import catalog
from .domains import INF, LqBall
from .engine import (
    ArithConfig,
    BohrParams,
    arith_bohr_estimate,
    bohr_sum_vector,
    class_sup,
    max_homogeneous_radius,
    homogeneous_scale_check,
    radius_solve,
)
from .family import random_battery, random_member, rescaled_battery

ESTIMATE_SLACK = 1e-5
ENGINE_MAX_N = 3


def _row(suite: str, case: str, passed: bool, value: float = math.nan, detail: str = "") -> dict:
    return {"suite": suite, "case": case, "passed": bool(passed), "value": float(value), "detail": detail}


def suite_homogeneous(seed: int = 0, ps=(1.0, 2.0), n: int = 2, q: float = 2.0) -> list[dict]:
    rows = []
    bat = random_battery(LqBall(n, q), seed=seed)
    for p in ps:
        params = BohrParams(p)
        d = np.full(n, 1.0 / n)
        tmax = max_homogeneous_radius(bat, params, d)
        r = 0.99 * tmax * d
        rep = homogeneous_scale_check(None, r, params, bat)
        rows.append(_row("homogeneous", f"p={p:g},n={n},q={q:g}", rep.passed and not rep.rejected, rep.slack, rep.reason))
    return rows


def suite_scaling(seed: int = 0, ts=(0.5, 2.0), cases=((2, 2.0, 1.0), (2, INF, 2.0))) -> list[dict]:
    rows = []
    for n, q, p in cases:
        bat = random_battery(LqBall(n, q), seed=seed)
        params = BohrParams(p)
        cfg = ArithConfig(seed=seed)
        base = arith_bohr_estimate(bat, params, cfg).value
        for t in ts:
            est = arith_bohr_estimate(rescaled_battery(bat, t), params, cfg).value
            err = abs(est - t * base)
            rows.append(_row("scaling", f"arith n={n},q={q:g},p={p:g},t={t:g}", err <= 1e-6, err))
    return rows


def suite_monotone(seed: int = 0, n_points: int = 50) -> list[dict]:
    rows = []
    rng = np.random.default_rng(seed)
    for n, q, p in ((2, 2.0, 1.0), (3, INF, 1.5), (2, 1.0, 2.0)):
        bat = random_battery(LqBall(n, q), seed=seed)
        params = BohrParams(p)
        worst = 0.0
        origin_ok = True
        for f in bat:
            origin_ok &= bohr_sum_vector(f, params, np.zeros(n)) == 0.5
            for _ in range(n_points // len(bat) + 1):
                r = rng.uniform(0, 0.3, size=n)
                r2 = r + rng.uniform(0, 0.05, size=n) * (rng.random(n) < 0.5)
                worst = max(worst, bohr_sum_vector(f, params, r) - bohr_sum_vector(f, params, r2))
        rows.append(_row("monotone", f"vector n={n},q={q:g},p={p:g}", worst <= 1e-12, worst))
        rows.append(_row("monotone", f"origin n={n},q={q:g},p={p:g}", origin_ok, 0.5))
        radii = np.linspace(0.0, 0.3, 7)
        sups = [class_sup(bat, params, float(r)).value for r in radii]
        drop = max(0.0, max(a - b for a, b in zip(sups, sups[1:])))
        rows.append(_row("monotone", f"class_sup n={n},q={q:g},p={p:g}", drop <= 1e-12, drop))
        small = random_battery(LqBall(n, q), size=n, seed=seed)
        big = small.extend(bat.functions[n:]).extend([random_member(LqBall(n, q), bat.K, seed + 1, 0)])
        a_small = arith_bohr_estimate(small, params).value
        a_big = arith_bohr_estimate(big, params).value
        rows.append(_row("monotone", f"battery arith n={n},q={q:g},p={p:g}", a_big <= a_small + 1e-9, a_big - a_small))
        r_small = radius_solve(small, params).lo
        r_big = radius_solve(big, params).lo
        rows.append(_row("monotone", f"battery radius n={n},q={q:g},p={p:g}", r_big <= r_small + 1e-12, r_big - r_small))
    return rows


def sandwich_cell(p: float, q: float, n: int, seed: int = 0, engine: bool = True) -> list[dict]:
    """Catalog consistency for one grid cell, plus engine estimates when ``n <= ENGINE_MAX_N``."""
    rows = []
    tag = f"p={p:g},q={q:g},n={n}"
    lo_a, hi_a = catalog.arith_bounds(p, q, n)
    rows.append(_row("sandwich", f"arith bounds {tag}", lo_a.value <= hi_a.value, hi_a.value - lo_a.value))
    if not math.isinf(q):
        lo_r, hi_r = catalog.radius_sandwich(p, q, n)
        rows.append(_row("sandwich", f"radius bounds {tag}", lo_r.value <= hi_r.value, hi_r.value - lo_r.value))
        lifted = tuple(x * n ** (1.0 / q) for x in (lo_a.value, hi_a.value))
        err = max(abs(lifted[0] - lo_r.value), abs(lifted[1] - hi_r.value))
        rows.append(_row("sandwich", f"lift consistency {tag}", err <= 1e-12 * max(1.0, hi_r.value), err))
    lo_p, hi_p = catalog.polydisc_arith_bounds(p, n)
    rows.append(_row("sandwich", f"polydisc bounds p={p:g},n={n}", lo_p.value <= hi_p.value, hi_p.value - lo_p.value))
    if engine and n <= ENGINE_MAX_N:
        bat = random_battery(LqBall(n, q), seed=seed)
        params = BohrParams(p)
        est = arith_bohr_estimate(bat, params, ArithConfig(seed=seed))
        rows.append(
            _row("sandwich", f"arith estimate <= upper {tag}", est.value <= hi_a.value + ESTIMATE_SLACK, est.value - hi_a.value)
        )
        if not math.isinf(q):
            rad = radius_solve(bat, params)
            rows.append(
                _row("sandwich", f"radius estimate <= upper {tag}", rad.hi <= hi_r.value + ESTIMATE_SLACK, rad.hi - hi_r.value)
            )
    return rows


def suite_sandwich(seed: int = 0, ps=(1.0, 2.0), qs=(1.0, 2.0), ns=(1, 2, 3), engine: bool = True) -> list[dict]:
    rows = []
    for p in ps:
        for q in qs:
            for n in ns:
                rows.extend(sandwich_cell(p, q, n, seed, engine))
    return rows


SUITES: dict[str, Callable[..., list[dict]]] = {
    "homogeneous": suite_homogeneous,
    "scaling": suite_scaling,
    "monotone": suite_monotone,
    "sandwich": suite_sandwich,
}


def run_suite(name: str, seed: int = 0) -> list[dict]:
    if name == "all":
        rows = []
        for fn in SUITES.values():
            rows.extend(fn(seed=seed))
        return rows
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}")
    return SUITES[name](seed=seed)
