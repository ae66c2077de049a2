"""p-Bohr sums, radius brackets and arithmetic-radius estimates over a battery.

Truth direction: a battery is a finite subset of the class, so every radius
or arithmetic radius computed here is an UPPER estimate of the quantity for
the whole class (bound_kind ``"upper_estimate"``).  Lower bounds and exact
values come from :mod:`bohrlab.catalog`.

Radii are absolute l_q radii: ``bohr_sum_domain(f, params, r, ball)`` takes
the supremum over ``||z||_q <= r``, so the admissible range for a ball of
scale ``t`` is ``[0, t]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels, catalog
from .domains import LqBall, OptimizerConfig, Posynomial, posynomial_sup
from .family import TestBattery, TestFunction, homogeneous_battery

TAIL_POLICIES = ("geometric_bound", "report_K")


@dataclass(frozen=True)
class BohrParams:
    p: float = 1.0
    tail_policy: str = "geometric_bound"

    def __post_init__(self) -> None:
        p = float(self.p)
        if not (1.0 <= p < math.inf):
            raise ValueError(f"p must lie in [1, inf), got {self.p}")
        object.__setattr__(self, "p", p)
        if self.tail_policy not in TAIL_POLICIES:
            raise ValueError(f"tail_policy must be one of {TAIL_POLICIES}")

    @property
    def budget_base(self) -> float:
        """``2^p``: the bracketed sum is <= 1 iff the inner sum is <= 2^p."""
        return 2.0**self.p

    @property
    def label(self) -> str:
        return "truncated" if self.tail_policy == "report_K" else "tail_bounded"


@dataclass(frozen=True)
class SumResult:
    value: float
    converged: bool = True
    x: np.ndarray | None = field(default=None, repr=False)

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class ClassSup:
    value: float
    argmax: int
    values: tuple[float, ...]
    converged: bool

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class RadiusInterval:
    lo: float
    hi: float
    witness: int | None
    witness_desc: dict | None
    K: int
    tol: float
    p: float
    q: float
    n: int
    scale: float = 1.0
    bound_kind: str = "upper_estimate"
    flags: tuple[str, ...] = ()
    catalog: tuple[catalog.BoundRecord, ...] = ()

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, x: float, slack: float = 0.0) -> bool:
        return self.lo - slack <= x <= self.hi + slack

    def inconsistencies(self, slack: float) -> list[str]:
        """Catalog facts the bracket contradicts, given it over-estimates the class radius."""
        out = []
        if self.lo > self.hi:
            out.append("lo > hi")
        if "unconstrained" in self.flags:
            return out
        for rec in self.catalog:
            if rec.kind in ("lower", "exact") and self.hi < rec.value - slack:
                out.append(f"{rec.name} {rec.kind} {rec.value:.12g} above battery radius {self.hi:.12g}")
        return out

    def to_record(self) -> dict:
        return {
            "quantity": "H^n_p",
            "p": self.p,
            "q": "inf" if math.isinf(self.q) else self.q,
            "n": self.n,
            "K": self.K,
            "interval": [self.lo, self.hi],
            "tol": self.tol,
            "bound_kind": self.bound_kind,
            "flags": list(self.flags),
            "witness": self.witness,
            "catalog": [r.to_json() for r in self.catalog],
        }


@dataclass(frozen=True)
class ArithEstimate:
    value: float
    r_vec: np.ndarray = field(repr=False)
    bound_kind: str = "upper_estimate"
    flags: tuple[str, ...] = ()
    K: int = 0
    p: float = 1.0

    def __post_init__(self) -> None:
        r = np.asarray(self.r_vec, dtype=float)
        if (r < 0).any():
            raise ValueError("radius vector must be nonnegative")
        object.__setattr__(self, "r_vec", r)

    def to_record(self) -> dict:
        return {
            "quantity": "A_p",
            "p": self.p,
            "K": self.K,
            "value": self.value,
            "r_vec": [float(x) for x in self.r_vec],
            "bound_kind": self.bound_kind,
            "flags": list(self.flags),
        }


@dataclass(frozen=True)
class ArithConfig:
    n_starts: int = 16
    iters: int = 2000
    seed: int = 0
    step0: float = 0.25
    min_step: float = 1e-12
    cap_factor: float = 100.0
    rtol: float = 1e-14


# ---------------------------------------------------------------- member data


def _c0p(f: TestFunction, p: float) -> float:
    return abs(f.series.constant_term) ** p


def _terms(f: TestFunction, p: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    key = ("terms", p)
    if key not in f._cache:
        alphas, mods = f.moduli()
        coef = np.ascontiguousarray(mods**p)
        expo = np.ascontiguousarray(alphas * p, dtype=float)
        deg = np.ascontiguousarray(alphas.sum(axis=1), dtype=np.int64)
        f._cache[key] = (coef, expo, deg)
    return f._cache[key]


def majorant(f: TestFunction, p: float) -> Posynomial:
    """``sum_{alpha != 0} |c_alpha|^p x^(p alpha)`` for the stored coefficients."""
    key = ("posy", p)
    if key not in f._cache:
        coef, expo, _ = _terms(f, p)
        f._cache[key] = Posynomial(coef, expo)
    return f._cache[key]


def _monomial_sups(f: TestFunction, p: float, q: float) -> tuple[np.ndarray, np.ndarray]:
    """Per-term ``coef * sup_{||x||_q=1} x^e`` and the term degrees ``|e|``."""
    key = ("msup", p, q)
    if key not in f._cache:
        coef, expo, _ = _terms(f, p)
        tot = expo.sum(axis=1)
        if math.isinf(q):
            s = np.ones_like(tot)
        else:
            with np.errstate(divide="ignore", invalid="ignore"):
                ratio = np.where(expo > 0, expo / np.where(tot > 0, tot, 1.0)[:, None], 1.0)
                s = np.prod(ratio ** (expo / q), axis=1)
        f._cache[key] = (coef * s, tot)
    return f._cache[key]


def _tail(f: TestFunction, params: BohrParams, rho: float) -> float:
    if params.tail_policy != "geometric_bound" or f.tail_model is None:
        return 0.0
    return f.tail_model.tail(params.p, rho)


def _finish(c0p: float, inner: float, p: float) -> float:
    if math.isinf(inner):
        return math.inf
    return 0.5 * (c0p + inner) ** (1.0 / p)


# ---------------------------------------------------------------- Bohr sums


def bohr_sum_vector(f: TestFunction, params: BohrParams, r: Sequence[float]) -> float:
    """``(1/2)(|c_0|^p + sum_{alpha != 0} |c_alpha|^p r^(p alpha))^(1/p)`` plus the tail bound."""
    x = np.ascontiguousarray(np.asarray(r, dtype=float).reshape(-1))
    if x.shape[0] != f.n:
        raise ValueError(f"radius vector length {x.shape[0]} != dimension {f.n}")
    if (x < 0).any():
        raise ValueError("radius vector must be nonnegative")
    g = majorant(f, params.p)
    s = float(g(x)) if len(g) else 0.0
    rho = f.tail_model.rho(x) if f.tail_model is not None else 0.0
    return _finish(_c0p(f, params.p), s + _tail(f, params, rho), params.p)


def bohr_sum_domain(
    f: TestFunction,
    params: BohrParams,
    r: float,
    ball: LqBall,
    cfg: OptimizerConfig | None = None,
) -> SumResult:
    """Supremum of the bracketed sum over ``||z||_q <= r``.

    The sum is monotone in each ``|z_i|``, so the supremum is taken on the
    nonnegative part of the sphere of radius ``r``.  A non-converged optimizer
    still yields a valid lower bound of the supremum of the truncated part.
    """
    if r < 0:
        raise ValueError("radius must be nonnegative")
    if ball.n != f.n:
        raise ValueError(f"ball dimension {ball.n} != function dimension {f.n}")
    c0p = _c0p(f, params.p)
    if r == 0:
        return SumResult(_finish(c0p, 0.0, params.p), True, np.zeros(f.n))
    sphere = LqBall(ball.n, ball.q, r)
    g = majorant(f, params.p)
    if len(g):
        sup = posynomial_sup(g, sphere, cfg)
        s, conv, x = sup.value, sup.converged, sup.x
    else:
        s, conv, x = 0.0, True, np.full(f.n, r)
    rho = f.tail_model.rho_sup(sphere) if f.tail_model is not None else 0.0
    return SumResult(_finish(c0p, s + _tail(f, params, rho), params.p), conv, x)


def class_sup(
    battery: TestBattery,
    params: BohrParams,
    r: float,
    ball: LqBall | None = None,
    cfg: OptimizerConfig | None = None,
) -> ClassSup:
    """Largest member sum at radius ``r``; ties go to the lowest battery index."""
    ball = battery.domain if ball is None else ball
    if ball.n != battery.domain.n:
        raise ValueError("battery and ball dimensions differ")
    vals = []
    conv = True
    for f in battery:
        res = bohr_sum_domain(f, params, r, ball, cfg)
        vals.append(res.value)
        conv = conv and res.converged
    best = int(np.argmax(vals))
    return ClassSup(float(vals[best]), best, tuple(vals), conv)


def _exceeds(f: TestFunction, params: BohrParams, r: float, ball: LqBall, cfg: OptimizerConfig | None) -> bool:
    """Whether the member's domain sum at radius ``r`` is above 1.

    Decides from cheap certificates where possible (probe values from below,
    sum of monomial suprema from above); both agree with the full ascent.
    """
    p = params.p
    if r == 0:
        return _finish(_c0p(f, p), 0.0, p) > 1.0
    sphere = LqBall(ball.n, ball.q, r)
    rho = f.tail_model.rho_sup(sphere) if f.tail_model is not None else 0.0
    room = params.budget_base - _c0p(f, p) - _tail(f, params, rho)
    if room < 0:
        return True
    g = majorant(f, p)
    if not len(g):
        return False
    if sphere.is_polydisc or sphere.n == 1:
        return float(g(np.full(f.n, r))) > room
    probes = np.vstack([np.eye(f.n) * r, np.full((1, f.n), r * f.n ** (-1.0 / sphere.q))])
    if float(np.max(g(probes))) > room:
        return True
    msup, tot = _monomial_sups(f, p, sphere.q)
    if float(np.sum(msup * r**tot)) <= room:
        return False
    return posynomial_sup(g, sphere, cfg).value > room


def radius_solve(
    battery: TestBattery,
    params: BohrParams,
    ball: LqBall | None = None,
    tol: float | None = None,
    cfg: OptimizerConfig | None = None,
) -> RadiusInterval:
    """Bisection bracket for the battery's p-Bohr radius of ``ball``.

    ``lo`` is admissible for every member and ``hi`` is not admissible for
    the witness member; ``hi - lo <= tol``.
    """
    ball = battery.domain if ball is None else ball
    if ball.n != battery.domain.n:
        raise ValueError("battery and ball dimensions differ")
    if tol is None:
        tol = 1e-9 if ball.n == 1 else 1e-6
    if not tol > 0:
        raise ValueError("tol must be positive")
    members = battery.functions

    def first_exceeding(r: float, hint: int | None) -> int | None:
        order = range(len(members))
        if hint is not None:
            order = [hint] + [i for i in order if i != hint]
        for i in order:
            if _exceeds(members[i], params, r, ball, cfg):
                return i
        return None

    cat = tuple(_scaled_records(params.p, ball))
    flags = [params.label]
    lo, hi = 0.0, ball.scale
    witness = first_exceeding(hi, None)
    if witness is None:
        flags.append("unconstrained at this K")
        return RadiusInterval(
            hi, hi, None, None, battery.K, tol, params.p, ball.q, ball.n, ball.scale,
            flags=tuple(flags), catalog=cat,
        )
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            flags.append("tol below float resolution")
            break
        w = first_exceeding(mid, witness)
        if w is None:
            lo = mid
        else:
            hi, witness = mid, w
    return RadiusInterval(
        lo, hi, witness, members[witness].descriptor(), battery.K, tol, params.p, ball.q, ball.n,
        ball.scale, flags=tuple(flags), catalog=cat,
    )


def _scaled_records(p: float, ball: LqBall) -> list[catalog.BoundRecord]:
    recs = catalog.radius_bounds(p, ball.q, ball.n)
    if ball.scale == 1.0:
        return recs
    return [
        catalog.BoundRecord(r.name, r.kind, r.value * ball.scale, r.validity + f", scale={ball.scale}", r.source, r.tags)
        for r in recs
    ]


# ---------------------------------------------------------------- arithmetic radius


class _Pack:
    """Battery terms concatenated for the block-sum and feasible-scale kernels."""

    def __init__(self, battery: TestBattery, params: BohrParams):
        p = params.p
        coefs, alphas, degs, seg = [], [], [], [0]
        budget, has_tail, zabs, tdeg, k0 = [], [], [], [], []
        weights = []
        n = battery.domain.n
        for f in battery:
            c, _, d = _terms(f, p)
            coefs.append(c)
            alphas.append(f.moduli()[0])
            degs.append(d)
            seg.append(seg[-1] + c.shape[0])
            budget.append(params.budget_base - _c0p(f, p))
            tm = f.tail_model
            use = tm is not None and params.tail_policy == "geometric_bound"
            has_tail.append(use)
            zabs.append(tm.zeta_abs if use else 0.0)
            tdeg.append(tm.degree if use else 1)
            k0.append(tm.k_included if use else 0)
            weights.append(tm.weights if use else (0.0,) * n)
        self.coef = np.ascontiguousarray(np.concatenate(coefs))
        self.alpha = np.ascontiguousarray(np.concatenate(alphas).reshape(-1, n).astype(np.int64))
        self.deg = np.ascontiguousarray(np.concatenate(degs).astype(np.int64))
        self.seg = np.asarray(seg, dtype=np.int64)
        self.kmax = int(max(battery.K, self.deg.max() if self.deg.size else 0))
        self.budget = np.asarray(budget, dtype=float)
        self.has_tail = np.asarray(has_tail, dtype=np.bool_)
        self.zabs = np.asarray(zabs, dtype=float)
        self.tdeg = np.asarray(tdeg, dtype=np.int64)
        self.k0 = np.asarray(k0, dtype=np.int64)
        self.weights = np.asarray(weights, dtype=float)
        self.p = p

    def feasible_scale(self, d: np.ndarray, t_hi: float, rtol: float) -> float:
        y = np.ascontiguousarray(d**self.p)
        blocks = _kernels.block_sums(self.coef, self.alpha, self.deg, self.seg, y, self.kmax)
        rho = np.sum(self.weights * d[None, :] ** self.tdeg[:, None], axis=1)
        zr = self.zabs * rho
        return float(
            _kernels.feasible_scale(blocks, self.p, self.budget, self.has_tail, zr, self.tdeg, self.k0, t_hi, rtol)
        )


def _simplex_starts(n: int, cfg: ArithConfig) -> list[np.ndarray]:
    starts = [np.full(n, 1.0 / n)]
    for i in range(n):
        d = np.full(n, 0.3 / (n - 1))
        d[i] = 0.7
        starts.append(d)
    rng = np.random.default_rng(cfg.seed)
    while len(starts) < cfg.n_starts:
        starts.append(rng.dirichlet(np.ones(n)))
    return starts


def _directions(n: int) -> list[np.ndarray]:
    """Mass-moving directions on the simplex: pairwise transfers, plus one-versus-rest for n >= 3."""
    out = []
    for i in range(n):
        for j in range(n):
            if i != j:
                v = np.zeros(n)
                v[i], v[j] = 1.0, -1.0
                out.append(v)
    if n >= 3:
        for i in range(n):
            v = np.full(n, 1.0 / (n - 1))
            v[i] = -1.0
            out.extend((v, -v))
    return out


def arith_bohr_estimate(
    battery: TestBattery,
    params: BohrParams,
    cfg: ArithConfig | None = None,
) -> ArithEstimate:
    """Maximize the mean of ``r >= 0`` subject to every member's vector sum being <= 1.

    ``r = t d`` with ``d`` on the simplex; for fixed ``d`` the largest
    feasible ``t`` is found by bisection (the radial shrink), and ``d`` is
    moved by a multi-start pattern search with step halving.  Components are
    capped at ``cap_factor * scale``; hitting the cap flags the estimate
    ``unconstrained``.
    """
    cfg = cfg or ArithConfig()
    ball = battery.domain
    n = ball.n
    cap = cfg.cap_factor * ball.scale
    pack = _Pack(battery, params)

    def phi(d: np.ndarray) -> float:
        d = np.ascontiguousarray(d)
        return pack.feasible_scale(d, cap / float(d.max()), cfg.rtol)

    flags = [params.label]
    if n == 1:
        t = phi(np.ones(1))
        if t >= cap * (1 - 1e-12):
            flags.append("unconstrained")
        return ArithEstimate(t, np.array([t]), flags=tuple(flags), K=battery.K, p=params.p)

    best_val, best_d = -1.0, None
    for i in range(n):
        corner = np.zeros(n)
        corner[i] = 1.0
        v = phi(corner)
        if v > best_val:
            best_val, best_d = v, corner
    dirs = _directions(n)
    for d0 in _simplex_starts(n, cfg):
        d = d0.copy()
        val = phi(d)
        step = cfg.step0
        for _ in range(cfg.iters):
            if step < cfg.min_step:
                break
            move_val, move_d = val, None
            for v in dirs:
                neg = v < 0
                h = min(step, float(np.min(d[neg] / -v[neg])))
                if h <= 0:
                    continue
                cand = np.clip(d + h * v, 0.0, None)
                cand /= cand.sum()
                c = phi(cand)
                if c > move_val:
                    move_val, move_d = c, cand
            if move_d is None:
                step *= 0.5
            else:
                d, val = move_d, move_val
                step = min(step * 1.5, 0.5)
        if val > best_val:
            best_val, best_d = val, d
    r = best_val * best_d
    if best_val >= (cap / float(best_d.max())) * (1 - 1e-9):
        flags.append("unconstrained")
    return ArithEstimate(float(np.mean(r)), r, flags=tuple(flags), K=battery.K, p=params.p)


# ---------------------------------------------------------------- homogeneous scaling check


@dataclass(frozen=True)
class ScaleCheckReport:
    passed: bool
    rejected: bool
    max_value: float
    slack: float
    values: tuple[float, ...] = ()
    reason: str = ""

    def to_record(self) -> dict:
        return {
            "check": "homogeneous_scaling",
            "passed": self.passed,
            "rejected": self.rejected,
            "max_value": self.max_value,
            "slack": self.slack,
            "reason": self.reason,
        }


def homogeneous_admissible(homog: Sequence[TestFunction], r: np.ndarray, params: BohrParams) -> float:
    """Largest ``(1/2)(sum_{|alpha|=m} |c_alpha|^p r^(p alpha))^(1/p)`` over the homogeneous members."""
    worst = 0.0
    for h in homog:
        worst = max(worst, bohr_sum_vector(h, BohrParams(params.p, "report_K"), r))
    return worst


def homogeneous_scale_check(
    homog_battery: Sequence[TestFunction] | None,
    r: Sequence[float],
    params: BohrParams,
    full_battery: TestBattery,
    eps: float = 1e-12,
) -> ScaleCheckReport:
    """If every homogeneous block is admissible at ``r``, each full member is admissible at ``r / 3^(1/p)``.

    ``homog_battery=None`` uses the homogeneous parts of ``full_battery``.
    Blocks above the truncation degree are covered through each member's
    tail model, which must have ratio <= 1 at ``r``.  The report's slack is
    ``1 - max`` sum at the shrunk radius.
    """
    r = np.asarray(r, dtype=float)
    if homog_battery is None:
        homog_battery = homogeneous_battery(full_battery)
    pre = homogeneous_admissible(homog_battery, r, params)
    if pre > 1.0 + eps:
        return ScaleCheckReport(False, True, math.nan, math.nan, reason=f"homogeneous hypothesis fails ({pre:.6g} > 1)")
    for f in full_battery:
        tm = f.tail_model
        if f.K and tm is not None and tm.ratio(tm.rho(r)) > 1.0 + eps:
            return ScaleCheckReport(False, True, math.nan, math.nan, reason="blocks beyond K not admissible at r")
    shrunk = r / 3.0 ** (1.0 / params.p)
    vals = tuple(bohr_sum_vector(f, params, shrunk) for f in full_battery)
    worst = max(vals)
    slack = 1.0 - worst
    return ScaleCheckReport(slack >= -eps, False, worst, slack, vals)


def max_homogeneous_radius(
    full_battery: TestBattery,
    params: BohrParams,
    direction: Sequence[float],
    homog_battery: Sequence[TestFunction] | None = None,
    rtol: float = 1e-12,
) -> float:
    """Largest ``t`` such that ``t * direction`` satisfies the homogeneous-block hypothesis.

    Covers stored blocks through ``homog_battery`` and the blocks beyond the
    truncation degree through each member's tail ratio (must stay <= 1).
    """
    d = np.asarray(direction, dtype=float)
    if homog_battery is None:
        homog_battery = homogeneous_battery(full_battery)

    def ok(t: float) -> bool:
        r = t * d
        if homogeneous_admissible(homog_battery, r, params) > 1.0:
            return False
        for f in full_battery:
            tm = f.tail_model
            if tm is not None and tm.ratio(tm.rho(r)) > 1.0:
                return False
        return True

    hi = 1.0
    while ok(hi):
        hi *= 2.0
        if hi > 1e12:
            return math.inf
    lo = 0.0
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo
