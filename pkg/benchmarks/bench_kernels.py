#!/usr/bin/env python3
"""Time the compiled kernels against their pure-Python flavours.

Usage:  python3 benchmarks/bench_kernels.py [--repeat N]

Both flavours run the same source (see surgekit/_kernels.py); the
compiled one is skipped when numba is unavailable or SURGEKIT_NO_NUMBA=1.
Results are best-of-N wall times, compilation excluded by a warm-up call.
"""

import argparse
import time

import numpy as np

from surgekit import _kernels
from surgekit.compressor import DEFAULT_MAP, throttle_from_flow
from surgekit.loop import (ControllerConfig, DisturbanceProfile, ValveModel,
                           initial_loop_state)

M = DEFAULT_MAP


def greitzer_case(n_steps):
    out = np.empty((n_steps + 1, 3))
    out[0] = (0.0, 0.63, 0.62)
    c0, c1, c2, c3 = M.cubic
    args = (out, 1e-3, M.psi0, M.h, M.slope, M.offset, c0, c1, c2, c3,
            0.8, 1.25, throttle_from_flow(M, 0.51))
    return args


def closed_loop_case(n_steps):
    cfg = ControllerConfig(kind="adaptive")
    valve = ValveModel()
    prof = DisturbanceProfile(target=0.35)
    state = initial_loop_state(cfg, valve, prof).as_array()
    out = np.empty((n_steps + 1, 11))
    c0, c1, c2, c3 = M.cubic
    args = (out, state, 1e-3, _kernels.KIND_ADAPTIVE, cfg.kp, cfg.ki,
            cfg.kd, cfg.gamma, cfg.reference, valve.tau, valve.out_min,
            valve.out_max, valve.tau, prof.target, prof.tau, 25.0, 8.5,
            False, M.psi0, M.h, M.slope, M.offset, c0, c1, c2, c3,
            0.8, 1.25)
    return args


def best_of(fn, case, repeat):
    times = []
    for _ in range(repeat):
        args = case()
        t0 = time.perf_counter()
        status, _ = fn(*args)
        times.append(time.perf_counter() - t0)
        assert status == _kernels.OK
    return min(times)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--steps", type=int, default=100_000)
    args = parser.parse_args()

    cases = [
        ("surge model, %dk RK4 steps" % (args.steps // 1000),
         _kernels.greitzer_loop_py, _kernels.greitzer_loop_jit,
         lambda: greitzer_case(args.steps)),
        ("closed loop, %dk RK4 steps" % (args.steps // 1000),
         _kernels.closed_loop_loop_py, _kernels.closed_loop_loop_jit,
         lambda: closed_loop_case(args.steps)),
    ]

    print(f"numba path enabled: {_kernels.NUMBA_ENABLED}")
    print(f"{'case':36s} {'python':>10s} {'numba':>10s} {'speedup':>9s}")
    for name, fn_py, fn_jit, case in cases:
        t_py = best_of(fn_py, case, args.repeat)
        if fn_jit is None:
            print(f"{name:36s} {t_py:9.3f}s {'-':>10s} {'-':>9s}")
            continue
        fn_jit(*case())  # warm-up/compile
        t_jit = best_of(fn_jit, case, args.repeat)
        print(f"{name:36s} {t_py:9.3f}s {t_jit:9.4f}s {t_py / t_jit:8.1f}x")


if __name__ == "__main__":
    main()
