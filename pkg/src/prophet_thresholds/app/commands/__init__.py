"""CLI subcommands; each module registers its parsers and handlers."""

from prophet_thresholds.app.commands import calibrate, constants, evaluate, reproduce, verify

COMMANDS = (calibrate, evaluate, constants, reproduce, verify)

__all__ = ["COMMANDS"]
