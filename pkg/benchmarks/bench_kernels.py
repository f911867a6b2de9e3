"""Benchmark the numba kernels against their pure-numpy twins.

Usage:
    python benchmarks/bench_kernels.py [--size 100000] [--repeat 7]

Both variants of every kernel are importable regardless of which one the
package selected at import time, so the comparison runs in a single process.
Without numba installed the "nb" column degenerates to interpreted Python
loops and is not meaningful.
"""

import argparse
import math
import time

import numpy as np

from stablepow import backend_name, kernels
from stablepow.density import _cache
from stablepow.specfun import _invg_table


def _timeit(fn, args, repeat):
    fn(*args)  # warm-up (JIT compile / cache fill)
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def build_cases(size):
    rng = np.random.default_rng(0)
    alpha = 0.7
    c = _cache(alpha)
    x_hi = np.exp(rng.uniform(np.log(c.xstar), np.log(50.0), size))
    x_lo = np.exp(rng.uniform(np.log(c.xstar) - 4.0, np.log(c.xstar), size))
    u = rng.uniform(1e-9, np.pi - 1e-9, size)
    u1 = rng.uniform(1e-12, 1.0 - 1e-12, size)
    u2 = rng.uniform(1e-12, 1.0 - 1e-12, size)
    y = rng.uniform(0.0, 1.5, size)
    return {
        "hp_batch": (x_hi, alpha, c.lg, c.sg),
        "kanter_quad_batch": (x_lo, c.psi, c.lnw_hi, c.gw_hi),
        "ml_series_batch": (y, _invg_table(alpha)),
        "b_triple_batch": (u, alpha),
        "a_c_batch": (u, alpha / (1.0 - alpha)),
        "eulerian_diff_batch": (u, alpha, 40),
        "z_transform_batch": (u1, u2, alpha),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=100_000, help="batch length")
    ap.add_argument("--repeat", type=int, default=7, help="timing repeats (best-of)")
    args = ap.parse_args()

    cases = build_cases(args.size)
    print(f"active backend: {backend_name()}   batch size: {args.size}")
    print(f"{'kernel':<22}{'numba ms':>12}{'numpy ms':>12}{'speedup':>10}")
    for name, call_args in cases.items():
        nb, np_ = kernels.PAIRS[name]
        t_nb = _timeit(nb, call_args, args.repeat) * 1e3
        t_np = _timeit(np_, call_args, args.repeat) * 1e3
        print(f"{name:<22}{t_nb:>12.3f}{t_np:>12.3f}{t_np / t_nb:>9.1f}x")


if __name__ == "__main__":
    main()
