"""Sparse multi-index truncated power series.

A :class:`TruncatedSeries` stores ``f(z) = sum_alpha c_alpha z^alpha`` for
``|alpha| <= K`` as an immutable map from exponent tuples to complex
coefficients.  Iteration is always graded-lexicographic so that floating
point reductions over the coefficients are reproducible.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping

import numpy as np


class MultiIndex(tuple):
    """Exponent vector ``alpha`` in N_0^n."""

    def __new__(cls, exponents: Iterable[int]) -> "MultiIndex":
        vals = tuple(int(e) for e in exponents)
        if any(e < 0 for e in vals):
            raise ValueError(f"negative exponent in multi-index {vals}")
        return super().__new__(cls, vals)

    @property
    def order(self) -> int:
        return sum(self)

    @classmethod
    def unit(cls, n: int, i: int) -> "MultiIndex":
        return cls(1 if j == i else 0 for j in range(n))

    @classmethod
    def zero(cls, n: int) -> "MultiIndex":
        return cls((0,) * n)


def grlex_key(alpha: tuple[int, ...]) -> tuple:
    """Graded order, higher powers of earlier variables first within a degree."""
    return (sum(alpha), tuple(-a for a in alpha))


def multi_indices(n: int, k: int) -> Iterator[MultiIndex]:
    """All ``alpha`` with ``len(alpha) == n`` and ``|alpha| == k``, in grlex order."""
    if n == 1:
        yield MultiIndex((k,))
        return
    for first in range(k, -1, -1):
        for rest in multi_indices(n - 1, k - first):
            yield MultiIndex((first,) + tuple(rest))


def multinomial(alpha: Iterable[int]) -> int:
    """``|alpha|! / alpha!`` computed exactly."""
    total = 0
    out = 1
    for a in alpha:
        for j in range(1, a + 1):
            total += 1
            out = out * total // j
    return out


@dataclass(frozen=True)
class TruncatedSeries:
    n: int
    K: int
    coeffs: Mapping[MultiIndex, complex] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("dimension n must be >= 1")
        if self.K < 0:
            raise ValueError("truncation degree K must be >= 0")
        clean: dict[MultiIndex, complex] = {}
        for alpha, c in self.coeffs.items():
            alpha = MultiIndex(alpha)
            if len(alpha) != self.n:
                raise ValueError(f"multi-index {alpha} has length != {self.n}")
            if alpha.order > self.K:
                raise ValueError(f"multi-index {alpha} exceeds truncation degree {self.K}")
            c = complex(c)
            if c != 0:
                clean[alpha] = c
        ordered = dict(sorted(clean.items(), key=lambda kv: grlex_key(kv[0])))
        object.__setattr__(self, "coeffs", MappingProxyType(ordered))

    @classmethod
    def constant(cls, n: int, K: int, value: complex = 1.0) -> "TruncatedSeries":
        return cls(n, K, {MultiIndex.zero(n): value})

    @classmethod
    def variable(cls, n: int, K: int, i: int, coeff: complex = 1.0) -> "TruncatedSeries":
        if K < 1:
            return cls(n, K)
        return cls(n, K, {MultiIndex.unit(n, i): coeff})

    @classmethod
    def linear(cls, weights: Iterable[complex], K: int) -> "TruncatedSeries":
        w = list(weights)
        n = len(w)
        if K < 1:
            return cls(n, K)
        return cls(n, K, {MultiIndex.unit(n, i): wi for i, wi in enumerate(w)})

    def __getitem__(self, alpha: Iterable[int]) -> complex:
        return self.coeffs.get(MultiIndex(alpha), 0j)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __iter__(self) -> Iterator[tuple[MultiIndex, complex]]:
        return iter(self.coeffs.items())

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        _check_dims(self, other)
        K = min(self.K, other.K)
        out: dict[MultiIndex, complex] = {}
        for src in (self, other):
            for alpha, c in src.coeffs.items():
                if alpha.order <= K:
                    out[alpha] = out.get(alpha, 0j) + c
        return TruncatedSeries(self.n, K, out)

    def scale(self, factor: complex) -> "TruncatedSeries":
        return TruncatedSeries(self.n, self.K, {a: factor * c for a, c in self.coeffs.items()})

    def __mul__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return multiply(self, other, min(self.K, other.K))

    @property
    def constant_term(self) -> complex:
        return self.coeffs.get(MultiIndex.zero(self.n), 0j)

    @property
    def degree(self) -> int:
        return max((a.order for a in self.coeffs), default=0)

    @cached_property
    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """``(alphas, coeffs)`` as ``(T, n)`` int and ``(T,)`` complex arrays in grlex order."""
        if not self.coeffs:
            return np.zeros((0, self.n), dtype=np.int64), np.zeros(0, dtype=complex)
        alphas = np.array(list(self.coeffs.keys()), dtype=np.int64).reshape(-1, self.n)
        vals = np.array(list(self.coeffs.values()), dtype=complex)
        return alphas, vals

    def truncate(self, K: int) -> "TruncatedSeries":
        return TruncatedSeries(self.n, K, {a: c for a, c in self.coeffs.items() if a.order <= K})

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "K": self.K,
            "terms": [
                {"alpha": list(alpha), "re": c.real, "im": c.imag}
                for alpha, c in self.coeffs.items()
            ],
        }

    @classmethod
    def from_json(cls, obj: Mapping | str) -> "TruncatedSeries":
        if isinstance(obj, str):
            obj = json.loads(obj)
        terms = {tuple(t["alpha"]): complex(t["re"], t["im"]) for t in obj["terms"]}
        return cls(int(obj["n"]), int(obj["K"]), terms)


def _check_dims(a: TruncatedSeries, b: TruncatedSeries) -> None:
    if a.n != b.n:
        raise ValueError(f"dimension mismatch: {a.n} != {b.n}")


def multiply(a: TruncatedSeries, b: TruncatedSeries, K: int) -> TruncatedSeries:
    """Cauchy product of ``a`` and ``b`` with every term of total degree above ``K`` dropped."""
    _check_dims(a, b)
    out: dict[tuple[int, ...], complex] = {}
    b_items = [(beta, beta.order, c) for beta, c in b.coeffs.items()]
    for alpha, ca in a.coeffs.items():
        room = K - alpha.order
        if room < 0:
            continue
        for beta, ob, cb in b_items:
            if ob > room:
                continue
            key = tuple(x + y for x, y in zip(alpha, beta))
            out[key] = out.get(key, 0j) + ca * cb
    return TruncatedSeries(a.n, K, out)


def power(a: TruncatedSeries, k: int, K: int) -> TruncatedSeries:
    """``a**k`` by repeated multiplication, truncated at total degree ``K``."""
    if k < 0:
        raise ValueError("power exponent must be nonnegative")
    out = TruncatedSeries.constant(a.n, K)
    for _ in range(k):
        out = multiply(out, a, K)
    return out


def homogeneous_part(a: TruncatedSeries, m: int) -> TruncatedSeries:
    if not 0 <= m <= a.K:
        raise ValueError(f"degree {m} outside [0, {a.K}]")
    return TruncatedSeries(a.n, a.K, {al: c for al, c in a.coeffs.items() if al.order == m})


def cayley_of(phi: TruncatedSeries, K: int) -> TruncatedSeries:
    """Series of ``(1 + phi) / (1 - phi) = 1 + 2 sum_{k>=1} phi^k`` up to degree ``K``.

    ``phi`` must vanish at the origin so that the result has constant term 1.
    """
    if phi.constant_term != 0:
        raise ValueError("phi must have zero constant term")
    phi = phi.truncate(min(phi.K, K)) if phi.K > K else phi
    acc: dict[MultiIndex, complex] = {MultiIndex.zero(phi.n): 1.0 + 0j}
    term = TruncatedSeries(phi.n, K, phi.coeffs)
    while term.coeffs:
        for alpha, c in term.coeffs.items():
            acc[alpha] = acc.get(alpha, 0j) + 2.0 * c
        term = multiply(term, phi, K)
    return TruncatedSeries(phi.n, K, acc)
