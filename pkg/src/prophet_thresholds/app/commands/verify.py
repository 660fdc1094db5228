"""verify all: run the verification suite; nonzero exit when any check fails."""

import argparse
import logging
from pathlib import Path

from prophet_thresholds.app.commands.output import emit_json
from prophet_thresholds.services.verify import run_suite

logger = logging.getLogger("prophet_thresholds.app.verify")


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("verify", help="Run verification checks")
    suites = parser.add_subparsers(dest="suite", required=True)
    everything = suites.add_parser("all", help="Every check")
    everything.add_argument("--fast", action="store_true", help="Smaller corpora and sample sizes")
    everything.add_argument("--out", default=None, help="Also write the JSON summary here")
    everything.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    summary = run_suite(fast=args.fast)
    if args.out:
        path = Path(args.out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(summary.model_dump_json(indent=2) + "\n")
    emit_json(summary)
    failed = [check.name for check in summary.checks if not check.passed]
    if failed:
        logger.error(f"{len(failed)} check(s) failed: {', '.join(failed)}")
        return 1
    logger.info(f"All {len(summary.checks)} checks passed")
    return 0
