#!/usr/bin/env python3
"""Time the compiled stepping core against the pure-numpy fallback.

Runs a representative catalog configuration (velocity-kick data, G'(u)=u^7,
gamma = 5 on the stock 200x100 grid) with each backend, reports best-of-N
wall times, and checks that the two trajectories agree.
"""

import argparse
import time

import numpy as np

import radialkg as rk
from radialkg import kernels


def best_of(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--gamma", type=float, default=5.0)
    parser.add_argument("--beta", type=float, default=0.0)
    parser.add_argument("--p", type=int, default=7)
    args = parser.parse_args()

    grid = rk.DEFAULT_GRID
    params = rk.PhysicsParams(args.beta, args.gamma, 1.0, rk.Power(args.p))

    def one_run():
        return rk.run(grid, params, rk.PRESET_B)

    kernels.select("python")
    t_py = best_of(one_run, args.repeats)
    traj_py = one_run()
    print(f"python fallback : {1e3 * t_py:8.2f} ms/run")

    if not kernels.compiled_available():
        print("compiled core   : not built (pip install -e . compiles it)")
        return

    kernels.select("compiled")
    t_c = best_of(one_run, args.repeats)
    traj_c = one_run()
    kernels.select("auto")
    print(f"compiled core   : {1e3 * t_c:8.2f} ms/run")
    print(f"speedup         : {t_py / t_c:8.1f}x")
    diff = float(np.max(np.abs(traj_c.levels - traj_py.levels)))
    print(f"max |difference|: {diff:8.2e}")
    if diff > 1e-9:
        raise SystemExit("backends disagree beyond tolerance")


if __name__ == "__main__":
    main()
