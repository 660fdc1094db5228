"""gamma and constants: the scalar constants for a supply k."""

import argparse

from prophet_thresholds.app.commands.output import emit_json
from prophet_thresholds.services.probcore import gamma, poisson_tail_ge, w_constant


def register(subparsers: argparse._SubParsersAction) -> None:
    for name, help_text in (
        ("gamma", "gamma_k = 1 - e^-k k^k / k!"),
        ("constants", "gamma_k, W_k and P(Pois(k) >= k)"),
    ):
        parser = subparsers.add_parser(name, help=help_text)
        parser.add_argument("--k", type=int, required=True, help="Supply")
        parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    result: dict[str, float | int] = {"k": args.k, "gamma": gamma(args.k)}
    if args.command == "constants":
        result["w"] = w_constant(args.k)
        result["stockout_target"] = poisson_tail_ge(float(args.k), args.k)
    emit_json(result)
    return 0
