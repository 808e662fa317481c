"""Compiled versus pure-Python integration kernel.

Times the right-hand side and a fixed-length Dormand-Prince run on both
backends and checks that they agree.  Run with ``python3 benchmarks/bench_kernels.py``.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from bistab import kernels
from bistab.dynamics import Scaling, TrajectoryState
from bistab.model import DriveParams, SystemParams, hz
from bistab.roots import find_all_roots


def scenario():
    sys = SystemParams(
        omega_pu=hz(205.3e12), omega_co=hz(194.1e12), omega_m1=hz(2e9), omega_m2=hz(2e9),
        kappa1=hz(520e6), kappa2=hz(1.73e9), kappa_e1=hz(0.26e6), kappa_e2=hz(8e6),
        gamma_m1=hz(1e7), gamma_m2=hz(1e7), g11=hz(850e3), g12=hz(860e3), g21=hz(400e3), g22=hz(405e3),
        J=hz(0.09e9),
    )
    drive = DriveParams(p_pu=0.05e-9, p_co=0.01e-9, delta1=hz(2e9), delta2=hz(2e9))
    return sys, drive


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--tau", type=float, default=200.0, help="scaled integration time")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    sys, drive = scenario()
    sc = Scaling(sys, drive)
    p = sc.params(drive)
    y0 = sc.to_scaled(TrajectoryState.from_solution(sys, drive, find_all_roots(sys, drive)[0]).as_array() * 1.01)
    results = {}
    for name in kernels.available():
        k = kernels.get(name)
        t_rhs = best_of(lambda: [k.rhs_scaled(y0, p, 0.0) for _ in range(10000)], args.repeat) / 10000
        run = lambda: k.dopri5(y0, 0.0, args.tau, p, 1e-8, 1e-12, 1e-2, 0.0, 1.0, False, np.zeros(0), 10**9)
        t_run = best_of(run, args.repeat)
        y, t, status, steps, *_ = run()
        results[name] = y
        print(f"{name:9s} rhs {t_rhs * 1e6:8.2f} us   dopri5 {t_run * 1e3:9.2f} ms  ({steps} steps, {t_run / steps * 1e6:.2f} us/step)")
    if len(results) == 2:
        diff = np.max(np.abs(results["compiled"] - results["python"]))
        print(f"max state difference between backends: {diff:.3e}")
    else:
        print("compiled kernel not built; only the Python backend was timed")


if __name__ == "__main__":
    main()
