"""Benchmark the jitted kernels against the pure-numpy fallback.

Run twice to compare paths:

    python benchmarks/bench_kernels.py
    DDCHAIN_DISABLE_JIT=1 python benchmarks/bench_kernels.py

Each benchmark reports best-of-repeats wall time; the jitted path is
warmed before timing so compilation is excluded.
"""
from __future__ import annotations

import math
import time

import numpy as np

from ddchain import _kernels
from ddchain.master import QubitState, evolve_density_matrix
from ddchain.model import CoefficientSeries, ModelParams
from ddchain.oracle import (FiniteBathSpec, exact_occupation_trace,
                            occupation_at_times)


def best_of(repeats, fn):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    path = "numba" if _kernels.NUMBA_ENABLED else "numpy fallback"
    print(f"kernel path: {path}")

    params = ModelParams(omega=0.5, big_gamma=0.1, beta=10.0)
    series = CoefficientSeries.build(params, k=math.pi / 2 + 0.1)
    bath = FiniteBathSpec.build(params, n_modes=200, bandwidth=20.0)

    def bench_rk4():
        evolve_density_matrix(series, QubitState.empty(), 50.0,
                              sample_stride=100)

    def bench_forward():
        exact_occupation_trace(params, 1.0, bath, 5.0)

    def bench_row():
        occupation_at_times(params, 1.0, bath, np.array([40.0]))

    cases = [
        ("master RK4, 5000 steps", bench_rk4, 3),
        ("bath propagator 201x201, 2000 steps", bench_forward, 3),
        ("bath first-row product, 16000 steps", bench_row, 3),
    ]
    for name, fn, repeats in cases:
        fn()  # warm (JIT compile / cache load)
        dt = best_of(repeats, fn)
        print(f"{name:45s} {dt * 1e3:10.2f} ms")


if __name__ == "__main__":
    main()
