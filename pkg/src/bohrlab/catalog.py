"""Closed forms and published bounds for Bohr radii, as pure formulas."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

from .domains import parse_q

KINDS = ("exact", "lower", "upper", "asymptotic")


@dataclass(frozen=True)
class BoundRecord:
    name: str
    kind: str
    value: float
    validity: str
    source: str
    tags: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        if math.isnan(self.value):
            raise ValueError(f"{self.name}: bound is NaN in its validity region")

    def to_json(self) -> dict:
        out = asdict(self)
        out["tags"] = list(self.tags)
        return out


def _pair(lower: BoundRecord, upper: BoundRecord) -> tuple[BoundRecord, BoundRecord]:
    if lower.value > upper.value * (1 + 1e-15):
        raise ValueError(f"{lower.name}: lower {lower.value} exceeds upper {upper.value}")
    return lower, upper


def _check_p(p: float) -> float:
    p = float(p)
    if not (1 <= p < math.inf):
        raise ValueError(f"p must lie in [1, inf), got {p}")
    return p


def h1p_closed_form(p: float) -> float:
    """One-variable p-Bohr radius ``((2^p - 1)/(2^(p+1) - 1))^(1/p)``."""
    p = float(p)
    if not p > 0:
        raise ValueError("p must be positive")
    return ((2.0**p - 1.0) / (2.0 ** (p + 1.0) - 1.0)) ** (1.0 / p)


def das_polydisc(p: float, n: int) -> BoundRecord:
    """p-Bohr radius of the unit polydisc: exact for p >= 2, asymptotic shape for 1 <= p < 2."""
    p = _check_p(p)
    if n <= 1:
        raise ValueError("n must exceed 1")
    if p >= 2:
        return BoundRecord("das_polydisc", "exact", h1p_closed_form(p), f"n={n}>1, p={p}>=2", "Das, p>=2")
    shape = (math.log(n) / n) ** ((2.0 - p) / (2.0 * p))
    return BoundRecord(
        "das_polydisc",
        "asymptotic",
        shape,
        f"n={n}>1, p={p}<2",
        "Das, p<2",
        ("asymptotic", "constant unknown"),
    )


def kn_bounds(n: int, q: float | str, c: float | None = None) -> dict[str, tuple[BoundRecord | None, BoundRecord | None]]:
    """Published bounds on the classical Bohr radius K^n of the unit l_q ball.

    Returns a mapping from the estimate's name to ``(lower, upper)``; only
    estimates valid for ``(n, q)`` appear.  The logarithmic lower bound needs
    the unspecified constant ``c`` and is omitted when ``c`` is None or when
    ``log log n <= 0``.  These concern bounded functions, not the half-plane
    class handled by the engine.
    """
    q = parse_q(q)
    if n < 2:
        raise ValueError("n must be >= 2")
    out: dict[str, tuple[BoundRecord | None, BoundRecord | None]] = {}
    sq = math.sqrt(1.0 / n)
    logn = math.log(n)
    cube = 1.0 / (3.0 * math.exp(1.0 / 3.0))
    if math.isinf(q):
        out["boas_khavinson_polydisc"] = _pair(
            BoundRecord("K_polydisc_BK", "lower", sq / 3.0, "q=inf, n>=2", "Boas-Khavinson"),
            BoundRecord("K_polydisc_BK", "upper", 2.0 * math.sqrt(logn / n), "q=inf, n>=2", "Boas-Khavinson"),
        )
    if q == 1:
        out["aizenberg_l1"] = _pair(
            BoundRecord("K_l1_Aizenberg", "lower", cube, "q=1", "Aizenberg", ("strict",)),
            BoundRecord("K_l1_Aizenberg", "upper", 1.0 / 3.0, "q=1", "Aizenberg"),
        )
    if 1 <= q < 2:
        e = 1.0 - 1.0 / q
        out["boas_q_below_2"] = (
            BoundRecord("K_lq_Boas_small_q", "lower", cube * (1.0 / n) ** e, "1<=q<2, n>1", "Boas"),
            BoundRecord("K_lq_Boas_small_q", "upper", 3.0 * (logn / n) ** e, "1<=q<2, n>1", "Boas", ("strict",)),
        )
    if q >= 2:
        out["boas_q_from_2"] = (
            BoundRecord("K_lq_Boas_large_q", "lower", sq / 3.0, "2<=q<=inf, n>1", "Boas"),
            BoundRecord("K_lq_Boas_large_q", "upper", 2.0 * math.sqrt(logn / n), "2<=q<=inf, n>1", "Boas", ("strict",)),
        )
    if c is not None:
        if not c > 0:
            raise ValueError("constant c must be positive")
        loglog = math.log(logn) if logn > 0 else -math.inf
        if loglog > 0:
            e = 1.0 - 1.0 / min(q, 2.0)
            val = (1.0 / c) * ((logn / loglog) / n) ** e
            out["defant_frerick_log"] = (
                BoundRecord("K_lq_Defant_Frerick", "lower", val, "1<=q<=inf, n>1", "Defant-Frerick", (f"c={c}",)),
                None,
            )
    return out


def arith_from_radius(hnp_value: float, n: int, q: float | str) -> float:
    """Arithmetic radius from the p-Bohr radius of the l_q ball: ``H / n^(1/q)``."""
    q = parse_q(q)
    if n < 1:
        raise ValueError("n must be >= 1")
    if math.isinf(q):
        return float(hnp_value)
    return float(hnp_value) / n ** (1.0 / q)


def arith_sandwich(p: float, q: float | str, n: int) -> tuple[BoundRecord, BoundRecord]:
    """``H/n <= A_p(B_q) <= (H / n^(1/p))^(1/q)`` with H the one-variable radius, finite q."""
    p = _check_p(p)
    q = parse_q(q)
    if math.isinf(q):
        raise ValueError("q = inf is covered by polydisc_arith_bounds")
    if n < 1:
        raise ValueError("n must be >= 1")
    H = h1p_closed_form(p)
    valid = f"p={p}, q={q:g}, n={n}"
    return _pair(
        BoundRecord("A_p(B_q)", "lower", H / n, valid, "arith vs disc radius, lower"),
        BoundRecord("A_p(B_q)", "upper", (H / n ** (1.0 / p)) ** (1.0 / q), valid, "arith vs disc radius, upper"),
    )


def radius_sandwich(p: float, q: float | str, n: int) -> tuple[BoundRecord, BoundRecord]:
    """``H / n^(1-1/q) <= H^n_p(B_q) <= (H / n^(1/p - 1))^(1/q)``.

    The upper bound is the image of :func:`arith_sandwich` under multiplication
    by ``n^(1/q)``; the record is tagged with the exponent form used.
    """
    p = _check_p(p)
    q = parse_q(q)
    if math.isinf(q):
        raise ValueError("q must be finite")
    if n < 1:
        raise ValueError("n must be >= 1")
    H = h1p_closed_form(p)
    valid = f"p={p}, q={q:g}, n={n}"
    return _pair(
        BoundRecord("H^n_p(B_q)", "lower", H / n ** (1.0 - 1.0 / q), valid, "radius sandwich, lower"),
        BoundRecord(
            "H^n_p(B_q)",
            "upper",
            (H / n ** (1.0 / p - 1.0)) ** (1.0 / q),
            valid,
            "radius sandwich, upper",
            ("exponent n^(1/p - 1): derived from the arithmetic relation",),
        ),
    )


def polydisc_arith_bounds(p: float, n: int) -> tuple[BoundRecord, BoundRecord]:
    """``H/n <= A_p(polydisc) <= H / n^(1/p - 1)``."""
    p = _check_p(p)
    if n < 1:
        raise ValueError("n must be >= 1")
    H = h1p_closed_form(p)
    valid = f"p={p}, q=inf, n={n}"
    return _pair(
        BoundRecord("A_p(polydisc)", "lower", H / n, valid, "arith polydisc, lower"),
        BoundRecord("A_p(polydisc)", "upper", H / n ** (1.0 / p - 1.0), valid, "arith polydisc, upper"),
    )


def l1_pinch(n: int) -> BoundRecord:
    """p = q = 1 pinch: the n-variable radius of the l_1 ball equals 1/3."""
    lo, hi = radius_sandwich(1.0, 1.0, n)
    assert lo.value == hi.value
    return BoundRecord(
        "H^n_1(B_1)",
        "exact",
        lo.value,
        f"p=1, q=1, n={n}",
        "sandwich pinch at p=q=1",
        ("label read as the n-variable radius",),
    )


def radius_bounds(p: float, q: float, n: int) -> list[BoundRecord]:
    """Every catalog record that speaks about ``H^n_p`` of the given ball."""
    q = parse_q(q)
    if n == 1:
        return [BoundRecord("H^1_p(D)", "exact", h1p_closed_form(p), f"p={p}", "one-variable closed form")]
    if math.isinf(q):
        rec = das_polydisc(p, n)
        lo_a, hi_a = polydisc_arith_bounds(p, n)
        # Arithmetic bounds lifted through the exact relation (n^(1/q) = 1 here).
        out = [
            BoundRecord("H^n_p(polydisc)", "lower", lo_a.value, rec.validity, "lifted arith bound"),
            BoundRecord("H^n_p(polydisc)", "upper", hi_a.value, rec.validity, "lifted arith bound"),
        ]
        if rec.kind == "exact":
            out.insert(0, rec)
        return out
    return list(radius_sandwich(p, q, n))


def arith_bounds(p: float, q: float, n: int) -> tuple[BoundRecord, BoundRecord]:
    q = parse_q(q)
    if math.isinf(q):
        return polydisc_arith_bounds(p, n)
    return arith_sandwich(p, q, n)
