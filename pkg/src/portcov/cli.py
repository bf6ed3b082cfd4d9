"""Command-line interface: ``portcov {matrix,verify,simulate,compare}``.

Machine-readable output goes to stdout or ``--out``; diagnostics go to stderr.
Exit status is 0 when every requested check passes, 1 when a check fails and
2 on invalid input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from .covariance import build_matrix
from .exact import format_ratio
from .identities import SUITES, SweepConfig, run_sweep, summarize
from .simulation import SimConfig, SimReport, compare_to_theory, run_replicates

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text)
    except OSError as exc:
        raise UsageError(f"cannot write {out}: {exc}") from exc


def _nonneg(name: str, value: int) -> int:
    if value < 0:
        raise UsageError(f"{name} must be >= 0, got {value}")
    return value


def cmd_matrix(args: argparse.Namespace) -> int:
    K = _nonneg("--max-index", args.max_index)
    m = build_matrix(K)
    if args.numeric == "exact":
        cells = [[format_ratio(q) for q in row] for row in m.entries]
    else:
        cells = [[round(float(q), args.digits) for q in row] for row in m.entries]

    if args.format == "json":
        text = json.dumps({"max_index": K, "numeric": args.numeric, "entries": cells}) + "\n"
    else:
        buf = io.StringIO()
        quoting = csv.QUOTE_NONNUMERIC if args.numeric == "exact" else csv.QUOTE_MINIMAL
        writer = csv.writer(buf, quoting=quoting, lineterminator="\n")
        buf.write(",".join(["i\\j", *map(str, range(K + 1))]) + "\n")
        for i, row in enumerate(cells):
            if args.numeric == "exact":
                writer.writerow([str(i), *row])
            else:
                writer.writerow([i, *(f"{x:.{args.digits}f}" for x in row)])
        text = buf.getvalue()
    _emit(text, args.out)
    return EXIT_OK


# CLI flag -> bound name; a flag applies to every selected suite that has that bound.
_BOUND_FLAGS = {
    "max_i": "i",
    "max_j": "j",
    "max_k": "k",
    "max_a": "a",
    "max_j_minus_k": "j_minus_k",
    "max_J": "J",
    "max_K": "K",
}


def cmd_verify(args: argparse.Namespace) -> int:
    suites = args.suite or list(SUITES)
    overrides = {
        bound: getattr(args, flag) for flag, bound in _BOUND_FLAGS.items() if getattr(args, flag) is not None
    }
    reports = []
    for name in suites:
        bounds = {k: v for k, v in overrides.items() if k in SUITES[name].bound_names}
        try:
            config = SweepConfig(name, bounds, max_counterexamples=args.max_counterexamples)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        report = run_sweep(config, workers=args.threads)
        status = "PASS" if report.passed else "FAIL"
        print(
            f"[{status}] {name}: {report.cases_checked} cases, {report.failures} failures, "
            f"{report.elapsed:.2f}s",
            file=sys.stderr,
        )
        reports.append(report)
    summary = summarize(reports)
    payload = {"summary": summary.to_dict(), "reports": [r.to_dict() for r in reports]}
    _emit(json.dumps(payload, indent=1) + "\n", args.out)
    return EXIT_OK if summary.passed else EXIT_FAIL


def cmd_simulate(args: argparse.Namespace) -> int:
    if args.replicates < 2:
        raise UsageError("--replicates must be >= 2 for covariance output")
    try:
        config = SimConfig(args.nodes, args.replicates, args.seed, args.max_degree)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    report = run_replicates(config, workers=args.threads)
    _emit(report.to_json(indent=1) + "\n", args.out)
    return EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    try:
        report = SimReport.load(args.sim)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot read simulation report {args.sim}: {exc}") from exc
    K = report.D if args.max_index is None else _nonneg("--max-index", args.max_index)
    try:
        result = compare_to_theory(report, build_matrix(K), z=args.z, abs_floor=args.abs_floor)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    for e in result.entries:
        if e.i <= e.j:
            mark = "ok  " if e.passed else "FAIL"
            print(
                f"{mark} sigma[{e.i},{e.j}] empirical={e.empirical:+.5f} theory={e.theory:+.5f} "
                f"dev={e.deviation:.5f} band={e.band:.5f}",
                file=sys.stderr,
            )
    _emit(json.dumps(result.to_dict(), indent=1) + "\n", args.out)
    return EXIT_OK if result.passed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="portcov",
        description="Outdegree covariances of random plane recursive trees.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("matrix", help="emit the closed-form covariance matrix")
    p.add_argument("--max-index", type=int, default=10)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exact", dest="numeric", action="store_const", const="exact")
    mode.add_argument("--float", dest="numeric", action="store_const", const="float")
    p.set_defaults(numeric="exact")
    p.add_argument("--digits", type=int, default=12)
    p.add_argument("--out")
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("verify", help="run exhaustive identity sweeps")
    p.add_argument("--suite", action="append", choices=list(SUITES))
    for flag in _BOUND_FLAGS:
        p.add_argument("--" + flag.replace("_", "-"), dest=flag, type=int)
    p.add_argument("--max-counterexamples", type=int, default=10)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", help="grow random trees and record outdegree statistics")
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--replicates", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-degree", type=int, default=10)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", help="compare a simulation report with the limiting covariances")
    p.add_argument("--sim", required=True)
    p.add_argument("--max-index", type=int)
    p.add_argument("--z", type=float, default=4.0)
    p.add_argument("--abs-floor", type=float, default=0.01)
    p.add_argument("--out")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"portcov {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
