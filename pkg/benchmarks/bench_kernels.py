"""Compare the compiled history-sum kernels against the numpy fallback.

Two views:

* a sweep that mimics the direct-mode solver loop, calling the kernel once
  per step with a growing history (the O(N^2) part of a solve), and
* an end-to-end integration of two library cases with the kernel functions
  swapped, confirming both backends produce the same trajectory.

Run from the repository root:

    python3 benchmarks/bench_kernels.py
    python3 benchmarks/bench_kernels.py --steps 512 1024 4096 --reps 5
"""
import argparse
import time

import numpy as np

from fracsolve import SolverConfig, get_case, run_case
from fracsolve import backends
from fracsolve.backends import BACKEND, backend_table


def sweep_time(impl, kernel_name, n_steps, dim, reps):
    """Median wall time of a solver-shaped kernel sweep.

    hist_dot shares one weight vector across components (single-order
    problems); hist_dot_multi carries one weight row per component.
    """
    rng = np.random.default_rng(42)
    F = rng.standard_normal((n_steps, dim))
    if kernel_name == "hist_dot":
        w = rng.standard_normal(n_steps + 1)
        kernel = impl.hist_dot
    else:
        w = rng.standard_normal((dim, n_steps + 1))
        kernel = impl.hist_dot_multi
    times = []
    for _ in range(reps):
        t0 = time.perf_counter()
        for n in range(1, n_steps + 1):
            kernel(w, F, 0, n, n - 1)
        times.append(time.perf_counter() - t0)
    return float(np.median(times))


def bench_sweeps(table, kernel_name, sizes, dim, reps):
    names = list(table)
    print(f"\n{kernel_name} sweep, {dim} component(s), median of {reps}:")
    header = f"{'steps':>8}" + "".join(f"{name + ' [s]':>16}" for name in names)
    if len(names) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for n_steps in sizes:
        row = [sweep_time(table[name], kernel_name, n_steps, dim, reps) for name in names]
        line = f"{n_steps:>8}" + "".join(f"{t:>16.4f}" for t in row)
        if len(row) == 2:
            line += f"{row[0] / row[1]:>9.1f}x"
        print(line)


def solve_with_backend(impl, case, method, dt):
    saved = backends.hist_dot, backends.hist_dot_multi
    backends.hist_dot, backends.hist_dot_multi = impl.hist_dot, impl.hist_dot_multi
    try:
        t0 = time.perf_counter()
        sol = run_case(case, method, SolverConfig(dt=dt))
        elapsed = time.perf_counter() - t0
    finally:
        backends.hist_dot, backends.hist_dot_multi = saved
    return sol, elapsed


def bench_solves(table):
    runs = [("nonlinear1", "pece", 2.0**-11), ("nonstiff3", "pitrap", 2.0**-9)]
    print("\nfull integrations:")
    print(f"{'case':>12} {'method':>8} {'steps':>7}" + "".join(f"{n + ' [s]':>16}" for n in table))
    for case_id, method, dt in runs:
        case = get_case(case_id)
        sols, times = {}, []
        for name, impl in table.items():
            sol, elapsed = solve_with_backend(impl, case, method, dt)
            sols[name] = sol
            times.append(elapsed)
        n_steps = len(sols[name].t) - 1
        print(f"{case_id:>12} {method:>8} {n_steps:>7}" + "".join(f"{t:>16.4f}" for t in times))
        if len(sols) == 2:
            a, b = (s.states for s in sols.values())
            print(f"{'':>29} max trajectory difference: {np.max(np.abs(a - b)):.2e}")


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--steps", type=int, nargs="+", default=[256, 1024, 4096],
                        help="history sweep lengths")
    parser.add_argument("--dims", type=int, nargs="+", default=[1, 3],
                        help="component counts for the sweep")
    parser.add_argument("--reps", type=int, default=3, help="repetitions (median kept)")
    args = parser.parse_args(argv)

    table = backend_table()
    print(f"active backend: {BACKEND}; available: {', '.join(table)}")
    if len(table) == 1:
        print("compiled extension not importable, timing the fallback alone")
    for dim in args.dims:
        bench_sweeps(table, "hist_dot", args.steps, dim, args.reps)
    bench_sweeps(table, "hist_dot_multi", args.steps, max(args.dims), args.reps)
    bench_solves(table)


if __name__ == "__main__":
    main()
