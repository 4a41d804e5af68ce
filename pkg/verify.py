#!/usr/bin/env python3
"""
Loop Lab Verification

Runs the numerical checks of the loop-variable formulation and writes one
report per check.

Usage:
    python verify.py all                            # Everything, default config
    python verify.py action --seed 7 --threads 4    # One suite
    python verify.py jacobians --json               # Aggregate JSON on stdout
    python verify.py pcm --tolerance two_sided_sigmas=4 --out reports/pcm.jsonl

Exit codes: 0 all checks pass, 1 a check failed or was inconclusive,
2 configuration or setup error.
"""

import argparse
import json
import logging
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from src.common import LoopLabError
from src.reporting import aggregate, exit_code, load_config, write_csv, write_jsonl
from src.suites import SUITES


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Loop Lab verification suites")
    parser.add_argument("command", choices=[*SUITES, "all"], help="Suite to run")
    parser.add_argument("--config", help="Config file (default: config.yaml or $LOOPLAB_CONFIG)")
    parser.add_argument("--seed", type=int, help="Override the run seed")
    parser.add_argument("--threads", type=int, help="Worker threads for Monte Carlo")
    parser.add_argument("--json", action="store_true", help="Print one aggregate JSON document")
    parser.add_argument("--out", help="Write reports as JSON lines")
    parser.add_argument("--csv", help="Write a CSV summary, one row per metric")
    parser.add_argument("--tolerance", action="append", default=[], metavar="NAME=VALUE",
                        help="Override a tolerance (repeatable)")
    parser.add_argument("--verbose", action="store_true", help="Debug logging on stderr")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(asctime)s %(name)s %(levelname)s: %(message)s", stream=sys.stderr)

    def say(text: str = ""):
        if not args.json:
            print(text)

    names = list(SUITES) if args.command == "all" else [args.command]
    reports = []
    try:
        config = load_config(args.config, args.seed, args.threads, args.out, args.csv, args.tolerance)
        say(f"\n{'='*50}")
        say(f"Loop Lab - {args.command} (seed {config.seed}, {config.threads} threads)")
        say(f"{'='*50}")
        for k, name in enumerate(names, 1):
            say(f"\n[{k}/{len(names)}] Running {name} checks...")
            for report in SUITES[name](config):
                reports.append(report)
                subject = f" [{report.subject}]" if report.subject else ""
                say(f"  {report.status.upper():<13}{report.check}{subject}  ({report.wall_time:.1f}s)")
                for m in report.failures():
                    say(f"    {m.name} = {m.value:.4g} ({m.kind} tolerance {m.tolerance:g})")
    except LoopLabError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2

    if config.out:
        say(f"\nReports: {write_jsonl(reports, config.out)}")
    if config.csv:
        say(f"Summary: {write_csv(reports, config.csv)}")
    code = exit_code(reports)
    if args.json:
        print(json.dumps(aggregate(reports), sort_keys=True, indent=2))
    else:
        summary = aggregate(reports)
        counts = ", ".join(f"{v} {k}" for k, v in summary["counts"].items())
        say(f"\n{'='*50}")
        say(f"{summary['status'].upper()}: {counts}")
    return code


if __name__ == "__main__":
    sys.exit(main())
