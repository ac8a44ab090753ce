"""Command-line front end: single solves to CSV, work-precision sweeps, and
Mittag-Leffler evaluation.

Exit codes: 0 success, 1 usage or setup error (unknown case/method, missing
oracle, bad parameters), 2 when the integration itself fails (divergence or
a stalled Newton iteration).
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import FracsolveError
from .library import (
    CASES,
    BenchmarkCase,
    applicable_methods,
    exact_error,
    get_case,
    run_case,
)
from .problems import SolverConfig

__all__ = ["main", "build_parser"]


class _Parser(argparse.ArgumentParser):
    """argparse defaults to exit code 2 on usage errors; we reserve 2 for
    failed integrations, so downgrade parser errors to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fracsolve", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ps = sub.add_parser("solve", help="integrate one case and write the trajectory as CSV")
    ps.add_argument("--case", required=True, help="case id, e.g. chua")
    ps.add_argument("--method", required=True, help="method token, e.g. pece")
    ps.add_argument("--dt", required=True, type=float, help="step size")
    ps.add_argument("--tf", type=float, default=None, help="override the final time")
    ps.add_argument("--out", default=None, help="CSV path (default: stdout)")
    ps.add_argument("--fft", action="store_true", help="use the blocked-FFT history sum")

    pb = sub.add_parser("bench", help="work-precision sweep over dyadic step sizes")
    pb.add_argument("--case", required=True)
    pb.add_argument("--methods", default=None, help="comma-separated method tokens "
                    "(default: every method applicable to the case)")
    pb.add_argument("--nmin", type=int, default=2, help="smallest n in h = 2^-n")
    pb.add_argument("--nmax", type=int, default=7, help="largest n in h = 2^-n")
    pb.add_argument("--metric", choices=("final_time", "sup_norm"), default="final_time")
    pb.add_argument("--reps", type=int, default=5, help="timing repetitions (median kept)")
    pb.add_argument("--out", default=None, help=".json or .csv path (default: JSON to stdout)")
    pb.add_argument("--svg", default=None, help="write a log-log work-precision chart")

    pm = sub.add_parser("mittleff", help="evaluate the Mittag-Leffler function")
    pm.add_argument("--alpha", required=True, type=float)
    pm.add_argument("--beta", required=True, type=float)
    pm.add_argument("--gamma", type=float, default=1.0)
    pm.add_argument("--z", required=True, type=float)

    return parser


# --------------------------------------------------------------------------
# solve
# --------------------------------------------------------------------------

def _with_final_time(case: BenchmarkCase, tf: float) -> BenchmarkCase:
    t0 = case.problem.tspan[0]
    problem = dataclasses.replace(case.problem, tspan=(t0, float(tf)))
    return dataclasses.replace(case, problem=problem)


def _write_csv(sol, out_path):
    d = sol.states.shape[1]
    lines = ["t," + ",".join(f"u{i + 1}" for i in range(d))]
    for tt, row in zip(sol.t, sol.states):
        lines.append(",".join("%.17g" % v for v in (tt, *row)))
    text = "\n".join(lines) + "\n"
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_solve(args) -> int:
    try:
        case = get_case(args.case)
    except ValueError as exc:
        print(f"fracsolve: {exc}", file=sys.stderr)
        return 1
    methods = applicable_methods(case)
    if args.method not in methods:
        print(
            f"fracsolve: method {args.method!r} is not available for case "
            f"{args.case!r}; valid methods: {', '.join(methods)}",
            file=sys.stderr,
        )
        return 1
    if args.tf is not None:
        case = _with_final_time(case, args.tf)
    try:
        config = SolverConfig(dt=args.dt, use_fft_history=args.fft)
        sol = run_case(case, args.method, config)
    except (FracsolveError, ValueError) as exc:
        print(f"fracsolve: {exc}", file=sys.stderr)
        return 1
    _write_csv(sol, args.out)
    # keep stdout clean for piping when the CSV goes there
    info = sys.stdout if args.out else sys.stderr
    stats = sol.stats
    print(
        f"retcode={sol.retcode.value} rhs_evals={stats['rhs_evals']} "
        f"newton_iters={stats['newton_iters_total']} "
        f"wall_time={stats['wall_time']:.4f}s",
        file=info,
    )
    for w in stats["warnings"]:
        print(f"warning: {w}", file=info)
    return 0 if sol.success else 2


# --------------------------------------------------------------------------
# bench
# --------------------------------------------------------------------------

def _bench_one(case: BenchmarkCase, method: str, n: int, reps: int, metric: str) -> dict:
    dt = 2.0**-n
    record = {
        "case_id": case.id,
        "method": method,
        "dt": dt,
        "error": "diverged",
        "wall_time_s": 0.0,
        "retcode": "",
    }
    config = SolverConfig(dt=dt)
    times = []
    sol = None
    try:
        for _ in range(max(1, reps)):
            sol = run_case(case, method, config)
            times.append(sol.stats["wall_time"])
    except FracsolveError as exc:
        record["retcode"] = type(exc).__name__
        record["wall_time_s"] = float(np.median(times)) if times else 0.0
        return record
    record["retcode"] = sol.retcode.value
    record["wall_time_s"] = float(np.median(times))
    if sol.success:
        err = exact_error(sol, case, metric)
        if math.isfinite(err):
            record["error"] = float(err)
    return record


def _thread_count() -> int:
    raw = os.environ.get("FRACSOLVE_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _records_to_csv(records) -> str:
    lines = ["case_id,method,dt,error,wall_time_s,retcode"]
    for r in records:
        err = r["error"] if isinstance(r["error"], str) else "%.17g" % r["error"]
        lines.append(
            f"{r['case_id']},{r['method']},{'%.17g' % r['dt']},{err},"
            f"{'%.17g' % r['wall_time_s']},{r['retcode']}"
        )
    return "\n".join(lines) + "\n"


def _write_svg(records, path) -> None:
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError as exc:
        raise FracsolveError(
            "matplotlib is required for --svg (install the 'plot' extra)"
        ) from exc
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    by_method: dict[str, list] = {}
    for r in records:
        if isinstance(r["error"], float) and r["error"] > 0.0:
            by_method.setdefault(r["method"], []).append(r)
    for method, rows in by_method.items():
        rows.sort(key=lambda r: r["dt"], reverse=True)
        ax.loglog(
            [r["wall_time_s"] for r in rows],
            [r["error"] for r in rows],
            marker="o",
            label=method,
        )
    ax.set_xlabel("wall time [s]")
    ax.set_ylabel("error")
    ax.grid(True, which="both", alpha=0.3)
    if by_method:
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def _cmd_bench(args) -> int:
    try:
        case = get_case(args.case)
    except ValueError as exc:
        print(f"fracsolve: {exc}", file=sys.stderr)
        return 1
    valid = applicable_methods(case)
    if args.methods:
        tokens = [m.strip() for m in args.methods.split(",") if m.strip()]
        # FLMM tokens stay listable on incommensurate cases; they produce
        # NonCommensurate records rather than a usage error
        known = valid if case.kind == "multiterm" else (
            "piex", "pirect", "pitrap", "pece", "bdf2", "trapezoid", "newtongregory"
        )
        bad = [m for m in tokens if m not in known]
        if bad or not tokens:
            print(
                f"fracsolve: unknown method(s) {', '.join(bad) or '(none)'} for case "
                f"{args.case!r}; valid tokens: {', '.join(known)}",
                file=sys.stderr,
            )
            return 1
    else:
        tokens = list(valid)
    if case.exact is None:
        print(
            f"fracsolve: case {args.case!r} has no analytical oracle; "
            "work-precision errors cannot be computed",
            file=sys.stderr,
        )
        return 1
    if args.nmin > args.nmax:
        print("fracsolve: --nmin must not exceed --nmax", file=sys.stderr)
        return 1
    combos = [(m, n) for m in tokens for n in range(args.nmin, args.nmax + 1)]
    workers = _thread_count()
    if workers == 1:
        results = {c: _bench_one(case, c[0], c[1], args.reps, args.metric) for c in combos}
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {c: pool.submit(_bench_one, case, c[0], c[1], args.reps, args.metric)
                       for c in combos}
            results = {c: f.result() for c, f in futures.items()}
    records = [results[c] for c in combos]
    if args.svg:
        try:
            _write_svg(records, args.svg)
        except FracsolveError as exc:
            print(f"fracsolve: {exc}", file=sys.stderr)
            return 1
    if args.out and args.out.lower().endswith(".csv"):
        with open(args.out, "w") as fh:
            fh.write(_records_to_csv(records))
    elif args.out:
        with open(args.out, "w") as fh:
            json.dump(records, fh, indent=2)
            fh.write("\n")
    else:
        json.dump(records, sys.stdout, indent=2)
        sys.stdout.write("\n")
    return 0


# --------------------------------------------------------------------------
# mittleff
# --------------------------------------------------------------------------

def _format_significant(v: float) -> str:
    """15 significant digits, positional unless the magnitude is extreme."""
    if v == 0.0:
        return "0.000000000000000"
    if abs(v) >= 1e16 or abs(v) < 1e-4:
        return np.format_float_scientific(v, precision=14, unique=False)
    return np.format_float_positional(v, precision=15, unique=False, fractional=False)


def _cmd_mittleff(args) -> int:
    from .specfun import MittagLefflerParams, mittag_leffler

    try:
        params = MittagLefflerParams(alpha=args.alpha, beta=args.beta, gamma=args.gamma)
        value = mittag_leffler(params, args.z)
    except (FracsolveError, ValueError) as exc:
        print(f"fracsolve: {exc}", file=sys.stderr)
        return 1
    print(_format_significant(value))
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "solve":
        return _cmd_solve(args)
    if args.command == "bench":
        return _cmd_bench(args)
    return _cmd_mittleff(args)


if __name__ == "__main__":
    sys.exit(main())
