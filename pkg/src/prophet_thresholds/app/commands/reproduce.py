"""
reproduce: CSV series behind the guarantee curves, tables and constructions.

Each target writes one row per grid point with a header row.
"""

import argparse
import logging

import numpy as np
import pandas as pd

from prophet_thresholds.app.commands.output import write_csv
from prophet_thresholds.services.probcore import gamma
from prophet_thresholds.services.verify import (
    ar_curve,
    demand_bad_sweep,
    gamma_series,
    hard_instance_sweep,
    ut_guarantee_curve,
    varphi_table,
)

logger = logging.getLogger("prophet_thresholds.app.reproduce")


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("reproduce", help="Write reproduction series as CSV")
    targets = parser.add_subparsers(dest="target", required=True)

    def target(name: str, help_text: str) -> argparse.ArgumentParser:
        sub = targets.add_parser(name, help=help_text)
        sub.add_argument("--out", default="-", help="CSV path; '-' writes to stdout")
        return sub

    figure1 = target("figure1", "gamma_k and min(gamma_k, k/(k+1)) per k")
    figure1.add_argument("--k-max", type=int, default=100)
    figure1.set_defaults(handler=handle_figure1)

    figure2 = target("figure2", "E[AR_k(Bin(n, k/n))] for n = k..n_max")
    figure2.add_argument("--k", type=int, required=True)
    figure2.add_argument("--n-max", type=int, default=5000)
    figure2.set_defaults(handler=handle_figure2)

    figure3 = target("figure3", "Guarantee of utilization targets a in (0, 1)")
    figure3.add_argument("--k", type=int, required=True)
    figure3.add_argument("--points", type=int, default=99)
    figure3.set_defaults(handler=handle_figure3)

    table = target("table-varphi", "varphi_k(k + l) for k = 9..30, l = 1..11")
    table.set_defaults(handler=handle_table_varphi)

    example1 = target("example1", "Acceptance sweep on the hard IID instance")
    example1.add_argument("--k", type=int, required=True)
    example1.add_argument("--n", type=int, required=True)
    example1.add_argument("--trials", type=int, default=100_000)
    example1.add_argument("--seed", type=int, default=0)
    example1.add_argument("--grid-points", type=int, default=201)
    example1.set_defaults(handler=handle_example1)

    example2 = target("example2", "Demand-calibrated ratio on the k/(k+1) instance")
    example2.add_argument("--k", type=int, required=True)
    example2.add_argument("--eps", type=float, nargs="+", required=True)
    example2.set_defaults(handler=handle_example2)


def handle_figure1(args: argparse.Namespace) -> int:
    rows = gamma_series(args.k_max)
    write_csv(pd.DataFrame(rows, columns=["k", "gamma", "demand_guarantee"]), args.out)
    return 0


def handle_figure2(args: argparse.Namespace) -> int:
    curve = ar_curve(args.k, args.n_max)
    logger.info(f"Minimum {curve.minimum:.6f} at n={curve.argmin}")
    write_csv(pd.DataFrame({"n": curve.n, "expected_ar": curve.values}), args.out)
    return 0


def handle_figure3(args: argparse.Namespace) -> int:
    levels = np.union1d(np.linspace(0.01, 0.99, args.points), [gamma(args.k)])
    points = ut_guarantee_curve(args.k, levels)
    write_csv(pd.DataFrame([point.model_dump() for point in points]), args.out)
    return 0


def handle_table_varphi(args: argparse.Namespace) -> int:
    table = varphi_table()
    frame = pd.DataFrame(
        table.values,
        index=pd.Index(table.k_values, name="k"),
        columns=[f"l={ell}" for ell in table.l_values],
    ).reset_index()
    write_csv(frame, args.out)
    return 0


def handle_example1(args: argparse.Namespace) -> int:
    result = hard_instance_sweep(args.k, args.n, args.trials, args.seed, args.grid_points)
    frame = pd.DataFrame(
        {
            "accept_prob": result.accept_probs,
            "performance": result.performances,
            "ratio": np.asarray(result.performances) / result.prophet,
        }
    )
    frame["envelope"] = result.envelope
    frame["prophet"] = result.prophet
    frame["prophet_std_error"] = result.prophet_std_error
    write_csv(frame, args.out)
    return 0


def handle_example2(args: argparse.Namespace) -> int:
    rows = []
    for eps in args.eps:
        result = demand_bad_sweep(args.k, eps)
        rows.append(
            {
                "eps": eps,
                "t": result.policy.t,
                "p": result.policy.p,
                "performance": result.performance,
                "prophet": result.prophet,
                "ratio": result.ratio,
                "limit": args.k / (args.k + 1),
            }
        )
    write_csv(pd.DataFrame(rows), args.out)
    return 0
