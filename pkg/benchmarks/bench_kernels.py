"""Time the numba kernels against their numpy twins, then an end-to-end solve per backend.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from bohrlab import _kernels as kr

E2E = """
import time
from bohrlab import LqBall, BohrParams, random_battery, radius_solve, arith_bohr_estimate
bat = random_battery(LqBall(3, 2.0))
radius_solve(bat, BohrParams(1.0))  # warm-up (JIT load)
t = time.perf_counter()
r = radius_solve(bat, BohrParams(1.0)).mid
a = arith_bohr_estimate(bat, BohrParams(1.0)).value
print(f"{time.perf_counter() - t:.3f} {r:.12f} {a:.12f}")
"""


def _inputs(rng):
    T, n = 400, 3
    alpha = rng.integers(0, 6, (T, n)).astype(np.int64)
    return {
        "eval_terms": (rng.uniform(0, 1, T), alpha.astype(float), rng.uniform(0, 1, (64, n))),
        "block_sums": (
            rng.uniform(0, 1, T), alpha, alpha.sum(1), np.array([0, 100, 200, 400], dtype=np.int64),
            rng.uniform(0, 1, n), int(alpha.sum(1).max()),
        ),
        "ascent": (rng.uniform(0.1, 1, 60), rng.uniform(0, 3, (60, n)), rng.normal(size=(16, n)), 500, 1e-10, 1.0),
    }


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args(argv)
    if not kr.HAVE_NUMBA:
        print("numba not installed; nothing to compare")
        return 0
    inputs = _inputs(np.random.default_rng(0))
    print(f"{'kernel':<12} {'numba ms':>10} {'numpy ms':>10} {'speedup':>8}")
    for name, a in inputs.items():
        fn_nb, fn_np = getattr(kr, f"{name}_numba"), getattr(kr, f"{name}_numpy")
        fn_nb(*a)  # compile / load cache
        t_nb = min(timeit.repeat(lambda: fn_nb(*a), number=1, repeat=args.repeat)) * 1e3
        t_np = min(timeit.repeat(lambda: fn_np(*a), number=1, repeat=max(3, args.repeat // 4))) * 1e3
        print(f"{name:<12} {t_nb:>10.3f} {t_np:>10.3f} {t_np / t_nb:>7.1f}x")
    print("\nend-to-end: radius + arithmetic estimate, n=3, q=2, p=1")
    for flag in ("0", "1"):
        env = dict(os.environ, BOHRLAB_DISABLE_NUMBA=flag)
        out = subprocess.run([sys.executable, "-c", E2E], env=env, capture_output=True, text=True, check=True).stdout.split()
        label = "numpy" if flag == "1" else "numba"
        print(f"  {label:<6} {out[0]:>8}s  radius={out[1]}  arith={out[2]}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
