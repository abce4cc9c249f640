"""Benchmark: compiled kernels versus the numpy fallback.

Run as ``python -m fracgrad.bench``.  Times the two summation backends on
the direct-quadrature kernels and prints one row per case together with
the max relative disagreement between the backends.
"""

import argparse
import time

import numpy as np

from . import _kernels_np
from .field import GridSpec
from .fracops import (
    _gradient_kernel_table,
    _laplacian_kernel_table,
    _potential_kernel_table,
)

try:
    from . import _kernels
except ImportError:
    _kernels = None


def _time(fn, *args, repeats=3):
    best = float("inf")
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, result


def _rel_gap(a, b):
    scale = max(float(np.abs(a).max()), 1e-300)
    return float(np.abs(np.asarray(a) - np.asarray(b)).max()) / scale


def run(cases, repeats):
    rows = []
    for n, N in cases:
        grid = GridSpec(n=n, extent=4.0, points=N, offset=True)
        rng = np.random.default_rng(0)
        u = rng.standard_normal(grid.shape)
        tables = {
            "laplacian": _laplacian_kernel_table(grid, 0.5),
            "gradient": _gradient_kernel_table(grid, 0.5, 0),
            "potential": _potential_kernel_table(grid, min(0.75, n / 2.0)),
        }
        for label, K in tables.items():
            t_np, r_np = _time(_kernels_np.circular_convolve, u, np.asarray(K), repeats=repeats)
            if _kernels is not None:
                t_cy, r_cy = _time(_kernels.circular_convolve, u, np.asarray(K), repeats=repeats)
                rows.append((f"conv:{label}", n, N, t_cy, t_np, _rel_gap(r_np, r_cy)))
            else:
                rows.append((f"conv:{label}", n, N, float("nan"), t_np, 0.0))
        if n <= 2:
            W = np.asarray(_laplacian_kernel_table(grid, 0.5))
            t_np, r_np = _time(_kernels_np.weighted_abs_diff_sum, u, W, repeats=repeats)
            if _kernels is not None:
                t_cy, r_cy = _time(_kernels.weighted_abs_diff_sum, u, W, repeats=repeats)
                gap = abs(r_np - r_cy) / max(abs(r_np), 1e-300)
                rows.append(("absdiff", n, N, t_cy, t_np, gap))
            else:
                rows.append(("absdiff", n, N, float("nan"), t_np, 0.0))
    return rows


def main(argv=None):
    parser = argparse.ArgumentParser(description="compare summation backends")
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--large", action="store_true", help="include the N=256 2-D case")
    args = parser.parse_args(argv)
    cases = [(1, 512), (2, 64), (2, 128)]
    if args.large:
        cases.append((2, 256))
    rows = run(cases, args.repeats)
    print(f"{'kernel':14s} {'n':>2s} {'N':>5s} {'cython [s]':>11s} {'numpy [s]':>11s} {'speedup':>8s} {'max rel gap':>12s}")
    for label, n, N, t_cy, t_np, gap in rows:
        speed = t_np / t_cy if t_cy == t_cy and t_cy > 0 else float("nan")
        print(f"{label:14s} {n:2d} {N:5d} {t_cy:11.4g} {t_np:11.4g} {speed:8.2f} {gap:12.3g}")
    if _kernels is None:
        print("compiled extension not available; numpy fallback only")


if __name__ == "__main__":
    main()
