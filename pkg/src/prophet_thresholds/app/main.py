"""
Prophet Thresholds - Command Line Interface.

Entry point for calibration, evaluation, simulation, reproduction and
verification commands.
"""

import argparse
import logging
import sys
from collections.abc import Sequence

import pydantic

from prophet_thresholds import __version__
from prophet_thresholds.app.commands import COMMANDS
from prophet_thresholds.config.settings import settings
from prophet_thresholds.domain.exceptions import ProphetThresholdsError

logger = logging.getLogger("prophet_thresholds")

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="prophet-thresholds",
        description="Static threshold policies for selling k identical items to randomly ordered applicants",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "--log-level",
        choices=LOG_LEVELS,
        default=None,
        help="Overrides PROPHET_LOG_LEVEL",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def configure_logging(level: str | None = None) -> None:
    """Log to stderr so stdout carries only JSON and CSV."""
    logging.basicConfig(
        level=getattr(logging, (level or settings.log_level).upper()),
        format=LOG_FORMAT,
        stream=sys.stderr,
        force=True,
    )


def run(argv: Sequence[str] | None = None) -> int:
    """
    Parse arguments and dispatch to the subcommand handler.

    Returns:
        0 on success, 1 on a library or validation error, 2 on a usage error
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    configure_logging(args.log_level)

    try:
        return int(args.handler(args))
    except ProphetThresholdsError as e:
        logger.error(f"{type(e).__name__}: {e.message}")
        sys.stderr.write(f"error: {e.message}\n")
        return 1
    except pydantic.ValidationError as e:
        logger.error(f"Invalid input: {e}")
        sys.stderr.write(f"error: {e}\n")
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
