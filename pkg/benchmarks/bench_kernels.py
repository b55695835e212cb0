"""Timing comparison of the numpy and numba kernel backends.

Runs each hot kernel on representative inputs, then a short full integration
through both backends. FFTs always go through numpy, so the integration gap
is narrower than the per-kernel gaps.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import math
import statistics
import time

import numpy as np

from kgbreather import SimParams, accel, integrate, make_grid


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def kernel_cases():
    rng = np.random.default_rng(42)
    n = 128
    u = rng.standard_normal(2 * n)  # padded-length cube input
    minv = rng.standard_normal((n, 4, 4))
    rhs = rng.standard_normal((n, 4)) + 1j * rng.standard_normal((n, 4))
    m = 256
    ang = np.cumsum(rng.uniform(-0.5, 1.0, m))
    pu = np.ascontiguousarray(np.cos(ang))
    pv = np.ascontiguousarray(np.sin(ang) * np.cos(ang))
    track_u = np.cos(np.linspace(0.0, 40.0 * math.pi, 16384))
    track_v = np.sin(np.linspace(0.0, 40.0 * math.pi, 16384))
    return {
        "cube (n=256)": lambda impl: impl["cube"](u),
        "stage_matvec (128x4)": lambda impl: impl["stage_matvec"](minv, rhs),
        "segment_hits (m=256)": lambda impl: impl["segment_hits"](pu, pv, 1e-12),
        "turn_sum (16384 pts)": lambda impl: impl["turn_sum"](track_u, track_v, 0.0, 0.0, False),
    }


def bench_kernels(repeat):
    print(f"{'kernel':<24} {'numpy':>12} {'numba':>12} {'speedup':>9}")
    for name, call in kernel_cases().items():
        row = {}
        for backend in ("numpy", "numba"):
            if backend not in accel.IMPLS:
                continue
            impl = accel.IMPLS[backend]
            call(impl)  # warm up (jit compile on first numba call)
            row[backend] = best_of(lambda: call(impl), repeat)
        if "numba" in row:
            print(
                f"{name:<24} {row['numpy'] * 1e6:>10.1f}us {row['numba'] * 1e6:>10.1f}us "
                f"{row['numpy'] / row['numba']:>8.2f}x"
            )
        else:
            print(f"{name:<24} {row['numpy'] * 1e6:>10.1f}us {'n/a':>12} {'n/a':>9}")


def bench_integration(repeat):
    params = SimParams(t_end=64.0)
    grid = make_grid(params.grid_points, params.domain_length)
    print(f"\nintegration to t=64 (512 steps, N={grid.n}):")
    saved = accel.BACKEND
    try:
        for backend in ("numpy", "numba"):
            if backend not in accel.IMPLS:
                continue
            accel.set_backend(backend)
            integrate(params, grid)  # warm up
            t = best_of(lambda: integrate(params, grid), repeat)
            print(f"  {backend:<8} {t * 1e3:>9.1f} ms")
    finally:
        accel.set_backend(saved)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5, help="timing repetitions (median taken)")
    args = ap.parse_args()
    print(f"backends available: {sorted(accel.IMPLS)}\n")
    bench_kernels(args.repeat)
    bench_integration(max(1, args.repeat // 2))


if __name__ == "__main__":
    main()
