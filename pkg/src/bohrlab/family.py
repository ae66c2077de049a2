"""Factories for members of the class of holomorphic f with Re f > 0 and f(0) = 1.

Every factory builds ``f = g o phi`` where ``g(w) = (1 + zeta w)/(1 - zeta w)``
is the half-plane extremal of the disc and ``phi`` maps the ball into the
disc: a linear form, a power sum ``sum z_i^q`` or the coordinate mean.
Membership is guaranteed by construction and never tested pointwise.

Besides its coefficients each member carries a :class:`TailModel`: a
majorant ``rho(x)`` of ``|phi|`` on the moduli such that the degree-k block
of the 1-D expansion is bounded by ``2^p (|zeta| rho(x))^(p k)``.  The
engine uses it to bound everything beyond the truncation degree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np

from .domains import INF, LqBall, conjugate, lq_norm, parse_q
from .series import TruncatedSeries, cayley_of, multi_indices, multinomial

PROVENANCE_TAGS = (
    "extremal",
    "cayley_linear",
    "power_sum_compose",
    "mean_compose",
    "random",
    "homogeneous_part",
)

_NORM_SLACK = 1e-12


@dataclass(frozen=True)
class TailModel:
    """Geometric majorant for the homogeneous blocks of a composed extremal.

    ``rho(x) = sum_i weights[i] * x_i ** degree`` dominates ``|phi(z)|`` for
    ``|z| = x``; blocks ``k > k_included`` are missing from the stored series.
    """

    zeta_abs: float
    weights: tuple[float, ...]
    degree: int
    k_included: int

    def rho(self, x: np.ndarray) -> float:
        w = np.asarray(self.weights)
        return float(np.sum(w * np.asarray(x, dtype=float) ** self.degree))

    def rho_sup(self, ball: LqBall) -> float:
        """``max rho(x)`` over ``x >= 0`` with ``||x||_q = ball.scale``."""
        w = np.asarray(self.weights, dtype=float)
        R, d, q = ball.scale, float(self.degree), ball.q
        if ball.is_polydisc:
            return self.rho(np.full(ball.n, R))
        if d >= q:
            return R**d * float(w.max())
        e = q / (q - d)
        return R**d * float(np.sum(w**e)) ** (1.0 / e)

    def ratio(self, rho: float) -> float:
        return self.zeta_abs * rho

    def tail(self, p: float, rho: float) -> float:
        """Bound on ``sum_{k > k_included} |c_k|^p * (block k mass)`` at majorant value ``rho``."""
        t = self.ratio(rho) ** p
        if t >= 1.0:
            return math.inf
        if t == 0.0:
            return 0.0
        return 2.0**p * t ** (self.k_included + 1) / (1.0 - t)


@dataclass(frozen=True)
class TestFunction:
    series: TruncatedSeries
    provenance: str
    params: dict = field(default_factory=dict)
    tail_model: TailModel | None = None
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    __test__ = False  # not a pytest class

    def __post_init__(self) -> None:
        if self.provenance not in PROVENANCE_TAGS:
            raise ValueError(f"unknown provenance {self.provenance!r}")
        c0 = self.series.constant_term
        expected = 0.0 if self.provenance == "homogeneous_part" else 1.0
        if c0 != expected:
            raise ValueError(f"constant coefficient must be {expected}, got {c0}")

    @property
    def n(self) -> int:
        return self.series.n

    @property
    def K(self) -> int:
        return self.series.K

    def moduli(self) -> tuple[np.ndarray, np.ndarray]:
        """Nonconstant ``(alphas, |c_alpha|)`` in grlex order."""
        if "moduli" not in self._cache:
            alphas, vals = self.series.arrays
            keep = alphas.sum(axis=1) > 0
            self._cache["moduli"] = (
                np.ascontiguousarray(alphas[keep]),
                np.ascontiguousarray(np.abs(vals[keep])),
            )
        return self._cache["moduli"]

    def descriptor(self) -> dict:
        return {"provenance": self.provenance, "K": self.K, "params": self.params}


@dataclass(frozen=True)
class TestBattery:
    functions: tuple[TestFunction, ...]
    domain: LqBall
    K: int

    __test__ = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "functions", tuple(self.functions))
        if not self.functions:
            raise ValueError("battery must be nonempty")
        for f in self.functions:
            if f.n != self.domain.n:
                raise ValueError(f"member dimension {f.n} != domain dimension {self.domain.n}")
            if f.K != self.K:
                raise ValueError(f"member truncation {f.K} != battery truncation {self.K}")

    def __len__(self) -> int:
        return len(self.functions)

    def __iter__(self):
        return iter(self.functions)

    def __getitem__(self, i: int) -> TestFunction:
        return self.functions[i]

    def extend(self, more: Iterable[TestFunction]) -> "TestBattery":
        return TestBattery(self.functions + tuple(more), self.domain, self.K)

    def manifest(self) -> dict:
        return {
            "domain": {"n": self.domain.n, "q": self.domain.q_label, "scale": self.domain.scale},
            "K": self.K,
            "members": [f.descriptor() for f in self.functions],
        }


def default_K(n: int) -> int:
    return 30 if n == 1 else 12


def _cjson(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def halfplane_extremal(zeta: complex, K: int) -> TestFunction:
    """``(1 + zeta z)/(1 - zeta z)`` on the disc: ``c_0 = 1``, ``c_k = 2 zeta^k``."""
    if abs(complex(zeta)) > 1.0 + _NORM_SLACK:
        raise ValueError(f"|zeta| = {abs(complex(zeta))} exceeds 1")
    return axis_extremal(LqBall(1), 0, K, zeta)


def _linear_member(
    w: np.ndarray, ball: LqBall, K: int, provenance: str, params: dict, tm: TailModel | None = None
) -> TestFunction:
    n = ball.n
    if w.shape != (n,):
        raise ValueError(f"weight vector must have length {n}")
    qc = conjugate(ball.q)
    norm = lq_norm(w, qc)
    if norm > 1.0 + _NORM_SLACK:
        raise ValueError(f"||w||_{qc:g} = {norm} exceeds 1; the function would leave the class")
    phi = TruncatedSeries.linear(w / ball.scale, K)
    series = cayley_of(phi, K)
    if tm is None:
        tm = TailModel(1.0, tuple(float(a) for a in np.abs(w) / ball.scale), 1, K)
    return TestFunction(series, provenance, params, tm)


def cayley_linear(w: Sequence[complex], ball: LqBall, K: int) -> TestFunction:
    """Cayley transform of ``phi(z) = sum_i w_i z_i / scale``; requires ``||w||_{q'} <= 1``."""
    w = np.asarray(w, dtype=complex)
    params = {"w": [_cjson(x) for x in w], "q": ball.q_label, "n": ball.n, "scale": ball.scale}
    return _linear_member(w, ball, K, "cayley_linear", params)


def axis_extremal(ball: LqBall, axis: int, K: int, zeta: complex = 1.0) -> TestFunction:
    """The disc extremal in the single variable ``z_axis / scale``."""
    zeta = complex(zeta)
    if abs(zeta) > 1.0 + _NORM_SLACK:
        raise ValueError(f"|zeta| = {abs(zeta)} exceeds 1")
    w = np.zeros(ball.n, dtype=complex)
    w[axis] = zeta
    params = {"zeta": _cjson(zeta), "axis": axis, "n": ball.n, "scale": ball.scale}
    weights = tuple(1.0 / ball.scale if i == axis else 0.0 for i in range(ball.n))
    tm = TailModel(abs(zeta), weights, 1, K)
    return _linear_member(w, ball, K, "extremal", params, tm)


def _one_dim_coeffs(f1d: TestFunction) -> list[complex]:
    if f1d.n != 1:
        raise ValueError("composition needs a one-variable function")
    return [f1d.series[(k,)] for k in range(f1d.K + 1)]


def power_sum_compose(f1d: TestFunction, q: int, n: int, K: int, scale: float = 1.0) -> TestFunction:
    """``u = f1d o v`` with ``v(z) = sum_i (z_i / scale)^q``.

    ``c_{q alpha}(u) = c_k(f1d) * k!/alpha! / scale^(q k)`` for ``|alpha| = k``.
    """
    if isinstance(q, bool) or not float(q).is_integer() or q < 1:
        raise ValueError(f"power-sum composition needs an integer q >= 1, got {q}")
    q = int(q)
    ck = _one_dim_coeffs(f1d)
    kmax = min(f1d.K, K // q)
    coeffs: dict[tuple[int, ...], complex] = {}
    for k in range(kmax + 1):
        if ck[k] == 0:
            continue
        denom = scale ** (q * k)
        for alpha in multi_indices(n, k):
            coeffs[tuple(q * a for a in alpha)] = ck[k] * multinomial(alpha) / denom
    tm = None
    if f1d.tail_model is not None:
        tm = TailModel(f1d.tail_model.zeta_abs, (scale ** (-q),) * n, q, kmax)
    params = {"f1d": f1d.descriptor(), "q": q, "n": n, "scale": scale}
    return TestFunction(TruncatedSeries(n, K, coeffs), "power_sum_compose", params, tm)


def mean_compose(f1d: TestFunction, n: int, K: int, scale: float = 1.0) -> TestFunction:
    """``h = f1d o s`` with ``s(z) = (z_1 + ... + z_n) / (n scale)``.

    ``c_alpha(h) = k!/alpha! * c_k(f1d) / (n scale)^k`` for ``|alpha| = k``.
    """
    if n < 1:
        raise ValueError("dimension must be >= 1")
    ck = _one_dim_coeffs(f1d)
    kmax = min(f1d.K, K)
    coeffs: dict[tuple[int, ...], complex] = {}
    for k in range(kmax + 1):
        if ck[k] == 0:
            continue
        denom = (n * scale) ** k
        for alpha in multi_indices(n, k):
            coeffs[tuple(alpha)] = ck[k] * multinomial(alpha) / denom
    tm = None
    if f1d.tail_model is not None:
        tm = TailModel(f1d.tail_model.zeta_abs, (1.0 / (n * scale),) * n, 1, kmax)
    params = {"f1d": f1d.descriptor(), "n": n, "scale": scale}
    return TestFunction(TruncatedSeries(n, K, coeffs), "mean_compose", params, tm)


def random_admissible_weights(ball: LqBall, rng: np.random.Generator) -> np.ndarray:
    """Complex weights with ``||w||_{q'}`` drawn uniformly from [0.7, 1]."""
    w = rng.normal(size=ball.n) + 1j * rng.normal(size=ball.n)
    target = rng.uniform(0.7, 1.0)
    return w * (target / lq_norm(w, conjugate(ball.q)))


def random_member(ball: LqBall, K: int, seed: int, index: int) -> TestFunction:
    rng = np.random.default_rng([seed, index])
    w = random_admissible_weights(ball, rng)
    params = {
        "w": [_cjson(x) for x in w],
        "q": ball.q_label,
        "n": ball.n,
        "scale": ball.scale,
        "seed": seed,
        "index": index,
    }
    return _linear_member(w, ball, K, "random", params)


def _integer_q(ball: LqBall) -> int | None:
    if ball.is_polydisc or not float(ball.q).is_integer():
        return None
    return int(ball.q)


def structured_members(ball: LqBall, K: int) -> list[TestFunction]:
    """Axis extremals followed by the power-sum and mean compositions of the extremal."""
    members = [axis_extremal(ball, i, K) for i in range(ball.n)]
    ext = halfplane_extremal(1.0, K)
    qi = _integer_q(ball)
    if qi is not None and not (ball.n == 1 and qi == 1):
        members.append(power_sum_compose(ext, qi, ball.n, K, ball.scale))
    if ball.n > 1:
        members.append(mean_compose(ext, ball.n, K, ball.scale))
    return members


def random_battery(
    ball: LqBall,
    size: int | None = None,
    K: int | None = None,
    seed: int = 0,
    n_random: int = 8,
) -> TestBattery:
    """Deterministic battery: structured members first, then seeded random linear ones.

    ``size=None`` keeps all structured members plus ``n_random`` random ones;
    a smaller ``size`` keeps the first ``size`` members of that ordering and a
    larger one pads with further random members.
    """
    K = default_K(ball.n) if K is None else K
    members = structured_members(ball, K)
    if size is None:
        size = len(members) + n_random
    if size < 1:
        raise ValueError("battery size must be >= 1")
    index = 0
    while len(members) < size:
        members.append(random_member(ball, K, seed, index))
        index += 1
    return TestBattery(tuple(members[:size]), ball, K)


def homogeneous_member(f: TestFunction, m: int) -> TestFunction:
    """The degree-``m`` block of ``f`` as a standalone battery entry (constant term 0)."""
    from .series import homogeneous_part

    if m < 1:
        raise ValueError("homogeneous degree must be >= 1")
    part = homogeneous_part(f.series, m)
    return TestFunction(part, "homogeneous_part", {"parent": f.descriptor(), "m": m}, None)


def homogeneous_battery(battery: TestBattery, degrees: Iterable[int] | None = None) -> list[TestFunction]:
    degrees = range(1, battery.K + 1) if degrees is None else degrees
    out = []
    for f in battery:
        for m in degrees:
            h = homogeneous_member(f, m)
            if len(h.series):
                out.append(h)
    return out


def regenerate(desc: dict, K: int | None = None) -> TestFunction:
    """Rebuild a member from :meth:`TestFunction.descriptor` output."""
    params: dict[str, Any] = desc["params"]
    K = desc["K"] if K is None else K
    tag = desc["provenance"]
    if tag == "extremal":
        zeta = complex(*params["zeta"])
        ball = LqBall(params["n"], INF, params["scale"])
        return axis_extremal(ball, params["axis"], K, zeta)
    if tag == "cayley_linear":
        ball = LqBall(params["n"], parse_q(params["q"]), params["scale"])
        return cayley_linear([complex(*x) for x in params["w"]], ball, K)
    if tag == "random":
        ball = LqBall(params["n"], parse_q(params["q"]), params["scale"])
        return random_member(ball, K, params["seed"], params["index"])
    if tag == "power_sum_compose":
        f1d = regenerate(params["f1d"])
        return power_sum_compose(f1d, params["q"], params["n"], K, params["scale"])
    if tag == "mean_compose":
        f1d = regenerate(params["f1d"])
        return mean_compose(f1d, params["n"], K, params["scale"])
    if tag == "homogeneous_part":
        return homogeneous_member(regenerate(params["parent"]), params["m"])
    raise ValueError(f"unknown provenance {tag!r}")


def _rescale_desc(desc: dict, t: float) -> dict:
    params = dict(desc["params"])
    if "parent" in params:
        params["parent"] = _rescale_desc(params["parent"], t)
    elif "scale" in params:
        params["scale"] = params["scale"] * t
    return {**desc, "params": params}


def rescaled_battery(battery: TestBattery, t: float) -> TestBattery:
    """The same members rebuilt for the ball ``t * domain``: ``f_t(z) = f(z / t)``."""
    if not t > 0:
        raise ValueError("scale factor must be positive")
    members = tuple(regenerate(_rescale_desc(f.descriptor(), t)) for f in battery)
    return TestBattery(members, battery.domain.scaled(t), battery.K)
