"""evaluate and simulate: exact and sampled performance of a given policy."""

import argparse

from pydantic import BaseModel

from prophet_thresholds.app.commands.output import emit_json
from prophet_thresholds.app.container import Container
from prophet_thresholds.domain.models import ProphetMode, ThresholdPolicy
from prophet_thresholds.services.evaluation import default_prophet, exact_performance, guarantee_report
from prophet_thresholds.services.prophet import prophet_value
from prophet_thresholds.services.storage import load_instance


class PerformanceResponse(BaseModel):
    """Exact performance without benchmarks."""

    policy: ThresholdPolicy
    performance: float


def _policy_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--instance", required=True, help="Instance JSON file")
    parser.add_argument("--t", type=float, required=True, help="Threshold")
    parser.add_argument("--p", type=float, default=0.0, help="Tie-break probability at t")


def register(subparsers: argparse._SubParsersAction) -> None:
    evaluate = subparsers.add_parser("evaluate", help="Exact performance and guarantee report")
    _policy_arguments(evaluate)
    evaluate.add_argument(
        "--benchmarks",
        action="store_true",
        help="Include prophet, LP and ratio certificates",
    )
    evaluate.add_argument(
        "--prophet-mode",
        choices=[mode.value for mode in ProphetMode],
        default=None,
        help="Prophet computation; defaults to exact within the enumeration cap",
    )
    evaluate.add_argument("--trials", type=int, default=None, help="Monte Carlo prophet trials")
    evaluate.add_argument("--seed", type=int, default=None, help="Monte Carlo prophet seed")
    evaluate.set_defaults(handler=handle_evaluate)

    simulate = subparsers.add_parser("simulate", help="Monte Carlo estimate of performance")
    _policy_arguments(simulate)
    simulate.add_argument("--trials", type=int, required=True, help="Number of trials")
    simulate.add_argument("--seed", type=int, default=0, help="Master seed")
    simulate.set_defaults(handler=handle_simulate)


def handle_evaluate(args: argparse.Namespace) -> int:
    inst = load_instance(args.instance)
    pol = ThresholdPolicy(t=args.t, p=args.p)
    if not args.benchmarks:
        emit_json(PerformanceResponse(policy=pol, performance=exact_performance(inst, pol)))
        return 0
    if args.prophet_mode is None:
        prophet = default_prophet(inst)
    else:
        prophet = prophet_value(inst, ProphetMode(args.prophet_mode), args.trials, args.seed)
    emit_json(guarantee_report(inst, pol, prophet))
    return 0


def handle_simulate(args: argparse.Namespace) -> int:
    inst = load_instance(args.instance)
    pol = ThresholdPolicy(t=args.t, p=args.p)
    emit_json(Container.get_simulator().run(inst, pol, args.trials, args.seed))
    return 0
