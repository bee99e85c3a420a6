#!/usr/bin/env python3
"""Benchmark the compiled full-model kernel against the pure-python fallback.

Usage:
    python benchmarks/benchmark_kernels.py
    python benchmarks/benchmark_kernels.py --horizons 200 1000 3000 --repeats 3
    python benchmarks/benchmark_kernels.py --output results.json

The same comparison can be forced package-wide by setting
CAPSIM_DISABLE_NUMBA=1, which routes every integration through the fallback.
"""

import argparse
import json
import time

from capsim import NUMBA_AVAILABLE
from capsim.integrator import IntegratorOptions, integrate_full
from capsim.sweeps import builtin_cases


def time_case(spec, horizon, use_numba, repeats):
    opts = IntegratorOptions.for_forcing(spec.params.omega, horizon)
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        integrate_full(spec.params, spec.initial, opts, use_numba=use_numba)
        best = min(best, time.perf_counter() - start)
    return best, opts.n_steps


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--horizons", type=float, nargs="+", default=[200.0, 1000.0, 3000.0])
    parser.add_argument("--cases", nargs="+", default=["case2", "rotatory"])
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--output", default=None, help="write results as JSON")
    args = parser.parse_args()

    cases = builtin_cases()
    results = []

    if NUMBA_AVAILABLE:
        print("warming up JIT compilation...")
        warm = cases[args.cases[0]]
        time_case(warm, 10.0, True, 1)
    else:
        print("numba not importable; timing the fallback only")

    header = f"{'case':>10} {'horizon':>9} {'steps':>9} {'numba (s)':>11} {'python (s)':>11} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for label in args.cases:
        spec = cases[label]
        for horizon in args.horizons:
            t_py, n_steps = time_case(spec, horizon, False, args.repeats)
            if NUMBA_AVAILABLE:
                t_nb, _ = time_case(spec, horizon, True, args.repeats)
                speedup = t_py / t_nb
                print(f"{label:>10} {horizon:>9g} {n_steps:>9} {t_nb:>11.4f} "
                      f"{t_py:>11.4f} {speedup:>8.1f}x")
            else:
                t_nb, speedup = float("nan"), float("nan")
                print(f"{label:>10} {horizon:>9g} {n_steps:>9} {'-':>11} {t_py:>11.4f} {'-':>9}")
            results.append({"case": label, "horizon": horizon, "steps": n_steps,
                            "numba_seconds": t_nb, "python_seconds": t_py,
                            "speedup": speedup})

    if args.output:
        with open(args.output, "w") as fh:
            json.dump({"numba_available": NUMBA_AVAILABLE, "results": results}, fh, indent=2)
        print(f"results written to {args.output}")


if __name__ == "__main__":
    main()
