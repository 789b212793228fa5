"""Command line entry point.

    yangslice verify SCENARIO [--order N] [--seed S] [--orientation default|reversed]
                              [--jobs K] [--out DIR]
    yangslice dump SCENARIO --what images|rseries|report-schema
    yangslice list

Exit status: 0 when every check passes, 1 when a check fails, 2 on invalid input.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from pathlib import Path

from .scenario import (
    ScenarioError, bundled_scenarios, dump_images, dump_rseries, dumps, load_scenario,
    report_schema, run_scenario, validate,
)

EXIT_OK, EXIT_FAIL, EXIT_INVALID = 0, 1, 2


def default_jobs() -> int:
    raw = os.environ.get("YANGSLICE_JOBS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="yangslice", description="Verify truncated shifted Yangian images.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run the suites of a scenario")
    v.add_argument("scenario", help="scenario JSON file or bundled scenario name")
    v.add_argument("--order", type=int, help="truncation order N")
    v.add_argument("--seed", type=int, help="seed for sampled checks")
    v.add_argument("--orientation", choices=("default", "reversed"))
    v.add_argument("--jobs", type=int, default=None, help="worker processes (default: $YANGSLICE_JOBS or 1)")
    v.add_argument("--out", type=Path, help="directory for report.json, timings.json and summary.txt")

    d = sub.add_parser("dump", help="print images, r-series or the report schema as JSON")
    d.add_argument("scenario", nargs="?")
    d.add_argument("--what", required=True, choices=("images", "rseries", "report-schema"))
    d.add_argument("--order", type=int)

    sub.add_parser("list", help="list bundled scenarios")
    return p


def _summary(report: dict, timings: dict) -> str:
    sc = report["scenario"]
    lines = [f"scenario {sc['name']} ({sc['type']}, order {sc['order']}, {report['environment']['orientation']})"]
    for name, suite in report["suites"].items():
        status = "PASS" if suite["passed"] else "FAIL"
        lines.append(f"  {status} {name}: {suite['checks'] - len(suite['failures'])}/{suite['checks']} "
                     f"checks ({timings.get(name, 0.0):.2f}s)")
        for f in suite["failures"][:10]:
            lines.append(f"    - {f['check']}: {f['detail']}")
        if len(suite["failures"]) > 10:
            lines.append(f"    ... {len(suite['failures']) - 10} more")
    lines.append("PASS" if report["passed"] else "FAIL")
    return "\n".join(lines) + "\n"


def _load(args) -> object:
    sc = load_scenario(args.scenario)
    changes = {}
    if getattr(args, "order", None) is not None:
        changes["order"] = args.order
    if getattr(args, "seed", None) is not None:
        changes["seed"] = args.seed
    if getattr(args, "orientation", None) is not None:
        changes["orientation"] = args.orientation
        changes["also_reversed"] = False
    if changes:
        sc = replace(sc, **changes)
        validate(sc)
    return sc


def cmd_verify(args) -> int:
    sc = _load(args)
    jobs = args.jobs if args.jobs is not None else default_jobs()
    if jobs < 1:
        raise ScenarioError("--jobs must be positive")
    report, timings = run_scenario(sc, jobs)
    summary = _summary(report, timings)
    sys.stdout.write(summary)
    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)
        (args.out / "report.json").write_text(dumps(report))
        (args.out / "timings.json").write_text(dumps({k: round(v, 4) for k, v in timings.items()}))
        (args.out / "summary.txt").write_text(summary)
    return EXIT_OK if report["passed"] else EXIT_FAIL


def cmd_dump(args) -> int:
    if args.what == "report-schema":
        sys.stdout.write(dumps(report_schema()))
        return EXIT_OK
    if not args.scenario:
        raise ScenarioError(f"dump --what {args.what} needs a scenario")
    sc = _load(args)
    data = dump_images(sc) if args.what == "images" else dump_rseries(sc)
    sys.stdout.write(dumps(data))
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        if args.command == "verify":
            return cmd_verify(args)
        if args.command == "dump":
            return cmd_dump(args)
        sys.stdout.write("\n".join(bundled_scenarios()) + "\n")
        return EXIT_OK
    except ScenarioError as exc:
        print(f"yangslice: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
