#!/usr/bin/env python3
"""Compare the numba and numpy time-stepping backends.

Runs the same segregated-data problem through both kernels, reports wall
time per backend (best of --repeat), the speedup, and the worst absolute
deviation between the two trajectories (u, z, and v at every sample).

Usage:
    python benchmarks/bench_backends.py [--n-cells 512] [--steps 20000]
                                        [--k 1e4] [--repeat 3]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from reactlab import Grid1D, ProblemSpec, run, segregated_bump_data, v_field
from reactlab.backends import backend_names
from reactlab.grid import BoundarySpec, DirichletConst


def build_spec(n_cells: int, steps: int, k: float) -> ProblemSpec:
    grid = Grid1D(0.0, 1.0, n_cells)
    u0, v0 = segregated_bump_data(grid, 32.0, 0.3, 0.2, 0.05)
    bc = BoundarySpec(DirichletConst(0.0), DirichletConst(0.0))
    T = 0.25
    return ProblemSpec(grid, bc, u0, v0, m=2.0, k=k, T=T, dt=T / steps)


def time_backend(spec: ProblemSpec, backend: str, stride: int,
                 repeat: int):
    run(spec, sample_stride=stride, backend=backend)  # warm up / compile
    best, traj = float("inf"), None
    for _ in range(repeat):
        start = time.perf_counter()
        traj = run(spec, sample_stride=stride, backend=backend)
        best = min(best, time.perf_counter() - start)
    return best, traj


def worst_deviation(a, b) -> float:
    worst = 0.0
    for sa, sb in zip(a.states, b.states):
        worst = max(worst,
                    float(np.max(np.abs(sa.u.values - sb.u.values))),
                    float(np.max(np.abs(sa.z.values - sb.z.values))),
                    float(np.max(np.abs(v_field(sa, a.spec).values
                                        - v_field(sb, b.spec).values))))
    return worst


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-cells", type=int, default=512)
    ap.add_argument("--steps", type=int, default=20000)
    ap.add_argument("--k", type=float, default=1e4)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    spec = build_spec(args.n_cells, args.steps, args.k)
    stride = max(1, args.steps // 50)
    print(f"{args.n_cells} cells, {args.steps} steps, k = {args.k:g}, "
          f"best of {args.repeat}")

    results = {}
    for backend in backend_names():
        try:
            seconds, traj = time_backend(spec, backend, stride, args.repeat)
        except ImportError as exc:
            print(f"{backend:>6}: unavailable ({exc})")
            continue
        results[backend] = (seconds, traj)
        rate = args.steps * (args.n_cells + 1) / seconds / 1e6
        print(f"{backend:>6}: {seconds:8.3f} s   "
              f"({rate:7.1f} M node-steps/s)")

    if len(results) == 2:
        t_numba, traj_numba = results["numba"]
        t_numpy, traj_numpy = results["numpy"]
        print(f"speedup numba vs numpy: {t_numpy / t_numba:.2f}x")
        print(f"max |numba - numpy| over u, z, v samples: "
              f"{worst_deviation(traj_numba, traj_numpy):.3e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
