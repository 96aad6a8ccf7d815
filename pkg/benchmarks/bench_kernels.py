#!/usr/bin/env python3
"""Benchmark the compiled split-scan kernel against the numpy fallback.

Times the greedy per-feature partition search on synthetic workloads that
mirror the fitting hot path (rows pre-sorted by feature value, conditioned
on an existing block decomposition), and cross-checks that both backends
return the same splits.

Usage: python benchmarks/bench_kernels.py [--quick]
"""

import argparse
import time

import numpy as np

from blockfit import _scan_py

try:
    from blockfit import _scan as _scan_c
except ImportError:
    _scan_c = None


def workload(n, n_uniques, n_blocks, seed, binary=True):
    rng = np.random.default_rng(seed)
    x = rng.integers(0, n_uniques, n).astype(np.float64)
    if binary:
        y = rng.binomial(1, 0.2 + 0.6 * (x > n_uniques / 2), n).astype(np.float64)
    else:
        y = x + rng.normal(0, 2.0, n)
    g = rng.integers(0, n_blocks, n).astype(np.int64)
    uniq, inv = np.unique(x, return_inverse=True)
    order = np.argsort(inv, kind="stable")
    d = y - y.mean()
    return (inv[order].astype(np.int64), g[order], y[order],
            uniq.size, n_blocks, float(d @ d))


def best_of(fn, repeats):
    best = float("inf")
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--quick", action="store_true", help="smaller sizes, fewer repeats")
    args = parser.parse_args()

    sizes = [(20_000, 64, 1), (20_000, 64, 200), (200_000, 64, 200),
             (200_000, 5000, 50), (1_000_000, 128, 400)]
    repeats = 3
    if args.quick:
        sizes = sizes[:3]
        repeats = 2

    print(f"{'rows':>9} {'uniques':>8} {'blocks':>7} {'python':>10} {'compiled':>10} {'speedup':>8}  agree")
    for n, u, b, in sizes:
        wl = workload(n, u, b, seed=42)
        t_py, res_py = best_of(lambda: _scan_py.fit_feature_partition(*wl, 1.0, 1e-4), repeats)
        if _scan_c is None:
            print(f"{n:>9} {u:>8} {b:>7} {t_py:>9.4f}s {'n/a':>10} {'n/a':>8}")
            continue
        t_c, res_c = best_of(lambda: _scan_c.fit_feature_partition(*wl, 1.0, 1e-4), repeats)
        agree = (np.array_equal(res_py[0], res_c[0])
                 and np.allclose(res_py[1], res_c[1], rtol=1e-10, atol=1e-14))
        print(f"{n:>9} {u:>8} {b:>7} {t_py:>9.4f}s {t_c:>9.4f}s {t_py / t_c:>7.1f}x  {agree}")
    if _scan_c is None:
        print("\ncompiled kernel not built; install with `pip install -e .` to compare")


if __name__ == "__main__":
    main()
