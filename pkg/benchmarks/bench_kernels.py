"""Compare the compiled and pure-Python kernels on representative workloads.

Usage: python benchmarks/bench_kernels.py [--n 20] [--repeat 3]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from hetsis import _backend, calibrate_to_R0
from hetsis.dynamics import CLAMP_TOL, MAX_HALVINGS, default_dt
from hetsis.equilibrium import FIXED_POINT_TOL
from hetsis.properties import random_model
from hetsis.spectral import POWER_MAX_ITER, POWER_SHIFT, POWER_TOL, transmission_matrix


def workloads(n: int, seed: int):
    rng = np.random.default_rng(seed)
    base = random_model(rng, n)
    while not np.any(base.k):
        base = random_model(rng, n)
    near = calibrate_to_R0(base, 1.01)  # slow linear convergence
    kmat = transmission_matrix(near)
    dt = default_dt(near)
    ngm = near.next_generation_kernel * near.mu[None, :]
    shift = POWER_SHIFT * float(ngm.sum(axis=1).max())
    return {
        "fixed_point R0=1.01": lambda k: k.fixed_point(kmat, near.gamma, np.ones(n), FIXED_POINT_TOL, 200_000),
        "rk4 20k steps": lambda k: k.rk4(kmat, near.gamma, np.ones(n), dt, 20_000, 100, CLAMP_TOL, MAX_HALVINGS),
        "power iteration": lambda k: k.power_iteration(ngm, shift, POWER_TOL, POWER_MAX_ITER),
    }


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=20, help="number of types")
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--seed", type=int, default=1)
    args = p.parse_args(argv)

    py = _backend.get("python")
    try:
        cy = _backend.get("cython")
    except ImportError:
        cy = None
        print("compiled kernels not built; timing the Python fallback only")

    print(f"{'workload':<22}{'python [s]':>12}{'cython [s]':>12}{'speedup':>10}")
    for name, run in workloads(args.n, args.seed).items():
        t_py = best_of(lambda: run(py), args.repeat)
        if cy is None:
            print(f"{name:<22}{t_py:>12.4f}{'-':>12}{'-':>10}")
            continue
        t_cy = best_of(lambda: run(cy), args.repeat)
        print(f"{name:<22}{t_py:>12.4f}{t_cy:>12.4f}{t_py / t_cy:>9.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
