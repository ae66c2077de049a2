"""Hot numeric kernels: posynomial evaluation, block sums, radial bisection, simplex ascent.

Each kernel exists twice, a numba ``@njit`` version and a pure-numpy
version.  The numba path is used when numba imports and the environment
variable ``BOHRLAB_DISABLE_NUMBA`` is unset (or ``0``).  Both paths follow
the same arithmetic; results agree to rounding, not bitwise.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

_flag = os.environ.get("BOHRLAB_DISABLE_NUMBA", "0").strip().lower()
USE_NUMBA = HAVE_NUMBA and _flag in ("", "0", "false", "no")


# ---------------------------------------------------------------- numpy path


def eval_terms_numpy(coef: np.ndarray, expo: np.ndarray, X: np.ndarray) -> np.ndarray:
    """``sum_t coef[t] * prod_i X[s, i] ** expo[t, i]`` for every row ``s`` of ``X``."""
    mono = np.prod(X[:, None, :] ** expo[None, :, :], axis=2)
    out = np.zeros(X.shape[0])
    for t in range(coef.shape[0]):
        out += coef[t] * mono[:, t]
    return out


def segment_eval_numpy(coef, expo, seg, x):
    """Per-segment sums of the terms at a single point ``x``; ``seg`` holds segment offsets."""
    mono = coef * np.prod(x[None, :] ** expo, axis=1)
    out = np.zeros(seg.shape[0] - 1)
    for j in range(out.shape[0]):
        acc = 0.0
        for t in range(seg[j], seg[j + 1]):
            acc += mono[t]
        out[j] = acc
    return out


def block_sums_numpy(coef, alpha, deg, seg, y, kmax):
    """Per-segment sums of ``coef[t] * y**alpha[t]`` grouped by integer degree ``deg[t]``.

    ``alpha`` holds integer exponents, so powers come from a lookup table.
    Result has shape (segments, kmax + 1).
    """
    table = y[:, None] ** np.arange(kmax + 1)[None, :]
    cols = np.arange(y.shape[0])[None, :]
    mono = coef * np.prod(table[cols, alpha], axis=1)
    out = np.zeros((seg.shape[0] - 1, kmax + 1))
    for j in range(out.shape[0]):
        for t in range(seg[j], seg[j + 1]):
            out[j, deg[t]] += mono[t]
    return out


def _member_total(blocks, p, t, twop, has_tail, zr, tdeg, k0):
    acc = 0.0
    tp = t**p
    w = 1.0
    for m in range(1, blocks.shape[0]):
        w *= tp
        acc += blocks[m] * w
    if has_tail:
        x = (zr * t**tdeg) ** p
        if x >= 1.0:
            return np.inf
        if x > 0.0:
            acc += twop * x ** (k0 + 1) / (1.0 - x)
    return acc


def feasible_scale_numpy(blocks, p, budget, has_tail, zr, tdeg, k0, t_hi, rtol):
    """Largest ``t <= t_hi`` keeping every member sum ``sum_m blocks[j, m] t^(p m) + tail_j(t)``
    within ``budget[j]``; bisection per member, feasible side returned."""
    twop = 2.0**p
    best = t_hi
    for j in range(blocks.shape[0]):
        if _member_total(blocks[j], p, best, twop, has_tail[j], zr[j], tdeg[j], k0[j]) <= budget[j]:
            continue
        lo, hi = 0.0, best
        for _ in range(200):
            if hi - lo <= rtol * hi:
                break
            mid = 0.5 * (lo + hi)
            if _member_total(blocks[j], p, mid, twop, has_tail[j], zr[j], tdeg[j], k0[j]) <= budget[j]:
                lo = mid
            else:
                hi = mid
        best = lo
    return best


def _softmax_rows(theta):
    z = theta - theta.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def _val_grad_numpy(b, F, U):
    mono = b[None, :] * np.prod(U[:, None, :] ** F[None, :, :], axis=2)
    g = mono.sum(axis=1)
    G = mono @ F
    return g, G


def ascent_numpy(b, F, theta0, iters, tol, step0):
    """Softmax-parametrized gradient ascent of ``sum_t b_t prod_i u_i**F_ti`` on the simplex.

    All starts advance together; each keeps its own step size.  Returns
    ``(values, U, iterations, converged)``.
    """
    S = theta0.shape[0]
    theta = theta0.copy()
    U = _softmax_rows(theta)
    g, G = _val_grad_numpy(b, F, U)
    eta = np.full(S, step0)
    active = np.ones(S, dtype=bool)
    conv = np.zeros(S, dtype=bool)
    its = np.zeros(S, dtype=np.int64)
    for _ in range(iters):
        if not active.any():
            break
        idx = np.nonzero(active)[0]
        its[idx] += 1
        gi = np.where(g[idx] > 0, g[idx], 1.0)
        d = (G[idx] - U[idx] * G[idx].sum(axis=1, keepdims=True)) / gi[:, None]
        small = np.abs(d).max(axis=1) <= 1e-12
        cand = theta[idx] + eta[idx, None] * d
        Uc = _softmax_rows(cand)
        gc, Gc = _val_grad_numpy(b, F, Uc)
        up = (gc > g[idx]) & ~small
        rel = np.where(up, (gc - g[idx]) / np.where(gc > 0, gc, 1.0), 0.0)
        acc = idx[up]
        theta[acc] = cand[up]
        U[acc] = Uc[up]
        g[acc] = gc[up]
        G[acc] = Gc[up]
        eta[acc] *= 1.5
        rej = idx[~up]
        eta[rej] *= 0.5
        done = small | (up & (rel < tol)) | (~up & (eta[idx] < 1e-14))
        conv[idx[done]] = True
        active[idx[done]] = False
    return g, U, its, conv


# ---------------------------------------------------------------- numba path

if HAVE_NUMBA:

    @njit(cache=True)
    def eval_terms_numba(coef, expo, X):
        S, n = X.shape
        T = coef.shape[0]
        out = np.zeros(S)
        for s in range(S):
            acc = 0.0
            for t in range(T):
                m = coef[t]
                for i in range(n):
                    e = expo[t, i]
                    if e != 0.0:
                        m *= X[s, i] ** e
                acc += m
            out[s] = acc
        return out

    @njit(cache=True)
    def segment_eval_numba(coef, expo, seg, x):
        n = x.shape[0]
        out = np.zeros(seg.shape[0] - 1)
        for j in range(out.shape[0]):
            acc = 0.0
            for t in range(seg[j], seg[j + 1]):
                m = coef[t]
                for i in range(n):
                    e = expo[t, i]
                    if e != 0.0:
                        m *= x[i] ** e
                acc += m
            out[j] = acc
        return out

    @njit(cache=True)
    def block_sums_numba(coef, alpha, deg, seg, y, kmax):
        n = y.shape[0]
        table = np.empty((n, kmax + 1))
        for i in range(n):
            table[i, 0] = 1.0
            for k in range(1, kmax + 1):
                table[i, k] = table[i, k - 1] * y[i]
        out = np.zeros((seg.shape[0] - 1, kmax + 1))
        for j in range(seg.shape[0] - 1):
            for t in range(seg[j], seg[j + 1]):
                m = coef[t]
                for i in range(n):
                    a = alpha[t, i]
                    if a != 0:
                        m *= table[i, a]
                out[j, deg[t]] += m
        return out

    @njit(cache=True)
    def _member_total_nb(blocks, p, t, twop, has_tail, zr, tdeg, k0):
        acc = 0.0
        tp = t**p
        w = 1.0
        for m in range(1, blocks.shape[0]):
            w *= tp
            acc += blocks[m] * w
        if has_tail:
            x = (zr * t**tdeg) ** p
            if x >= 1.0:
                return np.inf
            if x > 0.0:
                acc += twop * x ** (k0 + 1) / (1.0 - x)
        return acc

    @njit(cache=True)
    def feasible_scale_numba(blocks, p, budget, has_tail, zr, tdeg, k0, t_hi, rtol):
        twop = 2.0**p
        best = t_hi
        for j in range(blocks.shape[0]):
            if _member_total_nb(blocks[j], p, best, twop, has_tail[j], zr[j], tdeg[j], k0[j]) <= budget[j]:
                continue
            lo = 0.0
            hi = best
            for _ in range(200):
                if hi - lo <= rtol * hi:
                    break
                mid = 0.5 * (lo + hi)
                if _member_total_nb(blocks[j], p, mid, twop, has_tail[j], zr[j], tdeg[j], k0[j]) <= budget[j]:
                    lo = mid
                else:
                    hi = mid
            best = lo
        return best

    @njit(cache=True)
    def _softmax(theta):
        mx = theta.max()
        e = np.exp(theta - mx)
        return e / e.sum()

    @njit(cache=True)
    def _val_grad(b, F, u):
        T, n = F.shape
        g = 0.0
        G = np.zeros(n)
        for t in range(T):
            m = b[t]
            for i in range(n):
                f = F[t, i]
                if f != 0.0:
                    m *= u[i] ** f
            g += m
            for i in range(n):
                G[i] += F[t, i] * m
        return g, G

    @njit(cache=True)
    def ascent_numba(b, F, theta0, iters, tol, step0):
        S, n = theta0.shape
        vals = np.empty(S)
        Uout = np.empty((S, n))
        its = np.zeros(S, dtype=np.int64)
        conv = np.zeros(S, dtype=np.bool_)
        for s in range(S):
            theta = theta0[s].copy()
            u = _softmax(theta)
            g, G = _val_grad(b, F, u)
            eta = step0
            for _ in range(iters):
                its[s] += 1
                gi = g if g > 0 else 1.0
                total = G.sum()
                d = (G - u * total) / gi
                if np.abs(d).max() <= 1e-12:
                    conv[s] = True
                    break
                cand = theta + eta * d
                uc = _softmax(cand)
                gc, Gc = _val_grad(b, F, uc)
                if gc > g:
                    rel = (gc - g) / (gc if gc > 0 else 1.0)
                    theta = cand
                    u = uc
                    g = gc
                    G = Gc
                    eta *= 1.5
                    if rel < tol:
                        conv[s] = True
                        break
                else:
                    eta *= 0.5
                    if eta < 1e-14:
                        conv[s] = True
                        break
            vals[s] = g
            Uout[s] = u
        return vals, Uout, its, conv


if USE_NUMBA:
    eval_terms = eval_terms_numba
    segment_eval = segment_eval_numba
    block_sums = block_sums_numba
    feasible_scale = feasible_scale_numba
    ascent = ascent_numba
else:
    eval_terms = eval_terms_numpy
    segment_eval = segment_eval_numpy
    block_sums = block_sums_numpy
    feasible_scale = feasible_scale_numpy
    ascent = ascent_numpy


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"
