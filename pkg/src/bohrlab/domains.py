"""Geometry of l_q balls and posynomial maximization on their spheres."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import _kernels

INF = math.inf


def parse_q(q: float | str) -> float:
    """Accept a number or the token ``"inf"``; reject exponents below 1."""
    if isinstance(q, str):
        q = INF if q.strip().lower() in ("inf", "infinity", "oo") else float(q)
    q = float(q)
    if math.isnan(q) or q < 1:
        raise ValueError(f"exponent q must lie in [1, inf], got {q}")
    return q


def conjugate(q: float) -> float:
    """Hoelder conjugate exponent q' with 1/q + 1/q' = 1."""
    if q == 1:
        return INF
    if math.isinf(q):
        return 1.0
    return q / (q - 1.0)


def lq_norm(x: Sequence[float] | np.ndarray, q: float) -> float:
    a = np.abs(np.asarray(x, dtype=complex))
    if a.size == 0:
        return 0.0
    if math.isinf(q):
        return float(a.max())
    return float(np.sum(a**q) ** (1.0 / q))


@dataclass(frozen=True)
class LqBall:
    """The ball ``scale * B_{l^n_q}``."""

    n: int
    q: float = INF
    scale: float = 1.0

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("dimension must be >= 1")
        object.__setattr__(self, "q", parse_q(self.q))
        if not self.scale > 0:
            raise ValueError("scale must be positive")

    @property
    def is_polydisc(self) -> bool:
        return math.isinf(self.q)

    @property
    def q_label(self) -> str:
        return "inf" if self.is_polydisc else f"{self.q:g}"

    def scaled(self, t: float) -> "LqBall":
        return LqBall(self.n, self.q, self.scale * t)

    def norm(self, x) -> float:
        return lq_norm(x, self.q)


def s_ratio(q_from: float, q_to: float, n: int) -> float:
    """Norm of the identity map l^n_{q_from} -> l^n_{q_to}, i.e. S(B_{q_from}, B_{q_to})."""
    q_from, q_to = parse_q(q_from), parse_q(q_to)
    if n < 1:
        raise ValueError("dimension must be >= 1")
    return float(n) ** max(0.0, 1.0 / q_to - 1.0 / q_from)


def monomial_sup(alpha: Sequence[int], q: float) -> float:
    """``sup |z^alpha|`` over the closed unit ball of l^n_q (Lagrange closed form)."""
    q = parse_q(q)
    a = [float(x) for x in alpha]
    total = sum(a)
    if total <= 0:
        raise ValueError("alpha must have positive order")
    if math.isinf(q):
        return 1.0
    out = 1.0
    for ai in a:
        if ai > 0:
            out *= (ai / total) ** (ai / q)
    return out


def norm_compare(r: Sequence[float], s: float) -> float:
    """``||r||_1 / (n^(1-1/s) ||r||_s)``, which lies in (0, 1] with equality for constant r.

    The zero vector is assigned 1 with a ``RuntimeWarning``.
    """
    s = parse_q(s)
    v = np.abs(np.asarray(r, dtype=float))
    if v.ndim != 1 or v.size == 0:
        raise ValueError("r must be a nonempty vector")
    n = v.size
    l1 = float(v.sum())
    if l1 == 0.0:
        warnings.warn("norm_compare of the zero vector defined as 1", RuntimeWarning, stacklevel=2)
        return 1.0
    # work with r / max(r) to keep the powers in range
    w = v / v.max()
    ls = float(w.max()) if math.isinf(s) else float(np.sum(w**s) ** (1.0 / s))
    return min(1.0, float(w.sum()) / (n ** (1.0 - 1.0 / s) * ls))


@dataclass(frozen=True)
class Posynomial:
    """``g(x) = sum_t coef[t] * prod_i x_i ** expo[t, i]`` with nonnegative data."""

    coef: np.ndarray
    expo: np.ndarray

    def __post_init__(self) -> None:
        coef = np.ascontiguousarray(self.coef, dtype=float).reshape(-1)
        expo = np.ascontiguousarray(self.expo, dtype=float)
        if expo.ndim != 2 or expo.shape[0] != coef.shape[0]:
            raise ValueError("expo must have shape (terms, n)")
        if (coef < 0).any() or (expo < 0).any():
            raise ValueError("posynomial coefficients and exponents must be nonnegative")
        object.__setattr__(self, "coef", coef)
        object.__setattr__(self, "expo", expo)

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[float, Sequence[float]]], n: int | None = None) -> "Posynomial":
        terms = list(terms)
        if not terms and n is None:
            raise ValueError("cannot infer dimension of an empty posynomial")
        if n is None:
            n = len(terms[0][1])
        coef = np.array([a for a, _ in terms], dtype=float)
        expo = np.array([list(e) for _, e in terms], dtype=float).reshape(len(terms), n)
        return cls(coef, expo)

    @property
    def n(self) -> int:
        return self.expo.shape[1]

    @property
    def degrees(self) -> np.ndarray:
        return self.expo.sum(axis=1)

    def __len__(self) -> int:
        return self.coef.shape[0]

    def __call__(self, x) -> float | np.ndarray:
        X = np.asarray(x, dtype=float)
        single = X.ndim == 1
        X = np.ascontiguousarray(np.atleast_2d(X))
        out = _kernels.eval_terms(self.coef, self.expo, X)
        return float(out[0]) if single else out


@dataclass(frozen=True)
class OptimizerConfig:
    n_starts: int = 16
    iters: int = 500
    tol: float = 1e-10
    seed: int = 0
    step0: float = 1.0


@dataclass(frozen=True)
class SupResult:
    value: float
    x: np.ndarray = field(repr=False)
    converged: bool = True
    iterations: int = 0
    method: str = "ascent"

    def __float__(self) -> float:
        return self.value


def start_thetas(n: int, cfg: OptimizerConfig) -> np.ndarray:
    """Softmax logits of the ascent starts: barycenter, one point near each axis, seeded random."""
    rows = [np.zeros(n)]
    for i in range(n):
        th = np.zeros(n)
        th[i] = 2.0
        rows.append(th)
    n_random = max(cfg.n_starts - 2 * n - 1, 1)
    rng = np.random.default_rng(cfg.seed)
    rows.extend(rng.normal(0.0, 1.5, size=(n_random, n)))
    return np.ascontiguousarray(np.array(rows, dtype=float))


def posynomial_sup(g: Posynomial, ball: LqBall, cfg: OptimizerConfig | None = None) -> SupResult:
    """Maximum of ``g`` over ``{x >= 0 : ||x||_q = ball.scale}``.

    For ``q = inf`` the maximum sits at the corner ``(scale, ..., scale)``.
    Otherwise the sphere is parametrized as ``x_i = scale * u_i**(1/q)`` with
    ``u`` on the simplex, and ``u = softmax(theta)`` is driven uphill from
    several deterministic starts.  The returned value is never below ``g`` at
    any probe point (simplex corners, starts, iterates).
    """
    cfg = cfg or OptimizerConfig()
    if len(g) == 0:
        raise ValueError("empty posynomial")
    if g.n != ball.n:
        raise ValueError(f"posynomial dimension {g.n} != ball dimension {ball.n}")
    n, s = ball.n, ball.scale
    if ball.is_polydisc or n == 1:
        x = np.full(n, s)
        return SupResult(float(g(x)), x, True, 0, "corner")

    q = ball.q
    b = np.ascontiguousarray(g.coef * s ** g.degrees)
    F = np.ascontiguousarray(g.expo / q)

    corners = np.eye(n) * s
    corner_vals = _kernels.eval_terms(g.coef, g.expo, np.ascontiguousarray(corners))
    best = int(np.argmax(corner_vals))
    best_val = float(corner_vals[best])
    best_x = corners[best].copy()

    theta0 = start_thetas(n, cfg)
    vals, U, its, conv = _kernels.ascent(b, F, theta0, cfg.iters, cfg.tol, cfg.step0)
    # deterministic reduction: first start index wins ties
    for k in range(vals.shape[0]):
        if vals[k] > best_val:
            best_val = float(vals[k])
            best_x = s * U[k] ** (1.0 / q)
    return SupResult(best_val, best_x, bool(conv.all()), int(its.max()), "ascent")
