"""calibrate: solve for the threshold policy meeting a statistic target."""

import argparse

from pydantic import BaseModel

from prophet_thresholds.app.commands.output import emit_json
from prophet_thresholds.domain.models import DemandStatistic, StatisticKind
from prophet_thresholds.services.calibration import calibrate, statistic_value, target_for
from prophet_thresholds.services.storage import load_instance


class CalibrationResponse(BaseModel):
    """Calibrated policy and the statistic it achieves."""

    t: float
    p: float
    statistic: StatisticKind
    target: float
    achieved: float


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("calibrate", help="Calibrate a threshold policy")
    parser.add_argument("--instance", required=True, help="Instance JSON file")
    parser.add_argument(
        "--statistic",
        required=True,
        choices=[kind.value for kind in StatisticKind],
        help="Demand statistic to calibrate",
    )
    target = parser.add_mutually_exclusive_group(required=True)
    target.add_argument("--target", type=float, help="Explicit target value")
    target.add_argument(
        "--paper-target",
        action="store_true",
        help="Use the statistic's designated target for the instance's supply",
    )
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    inst = load_instance(args.instance)
    kind = StatisticKind(args.statistic)
    stat = DemandStatistic(kind=kind, k=inst.k)
    value = target_for(kind, inst.k) if args.paper_target else args.target
    pol = calibrate(inst, stat, value)
    emit_json(
        CalibrationResponse(
            t=pol.t,
            p=pol.p,
            statistic=kind,
            target=value,
            achieved=statistic_value(inst, pol, stat),
        )
    )
    return 0
