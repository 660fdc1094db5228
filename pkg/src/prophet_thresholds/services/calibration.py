"""
Policy Calibration.

Finds the static threshold policy (t, p) whose demand statistic hits a target.
"""

import logging

import numpy as np

from prophet_thresholds.config.settings import settings
from prophet_thresholds.domain.exceptions import (
    CalibrationError,
    ConvergenceError,
    UnattainableTargetError,
    UnsupportedStatisticError,
)
from prophet_thresholds.domain.models import (
    DemandStatistic,
    Instance,
    StatisticKind,
    ThresholdPolicy,
)
from prophet_thresholds.services.instances import atom_values, eligibility
from prophet_thresholds.services.probcore import (
    check_supply,
    expect_statistic,
    gamma,
    poisson_binomial,
    poisson_tail_ge,
)

logger = logging.getLogger("prophet_thresholds.calibration")


def statistic_value(inst: Instance, pol: ThresholdPolicy, stat: DemandStatistic) -> float:
    """E[g(D)] for the demand law induced by the policy."""
    summary = eligibility(inst, pol)
    if stat.kind is StatisticKind.EXPECTED_DEMAND:
        return float(np.sum(summary.q))
    return expect_statistic(poisson_binomial(summary.q), stat)


def target_for(kind: StatisticKind, k: int) -> float:
    """Default calibration target for a statistic."""
    check_supply(k)
    match kind:
        case StatisticKind.EXPECTED_UTILIZATION:
            return gamma(k)
        case StatisticKind.EXPECTED_DEMAND:
            return float(k)
        case StatisticKind.STOCKOUT_PROBABILITY:
            return poisson_tail_ge(float(k), k)
    raise UnsupportedStatisticError(f"Statistic {kind.value} has no designated target")


def _bisect_tie_break(
    inst: Instance,
    t: float,
    stat: DemandStatistic,
    target: float,
    tolerance: float,
    max_iterations: int,
) -> float:
    # Slope in p is the tie mass at t (up to n): converge on the statistic, not on p.
    lo, hi = 0.0, 1.0
    best_p, best_gap = 0.0, np.inf
    for iteration in range(max_iterations):
        mid = 0.5 * (lo + hi)
        value = statistic_value(inst, ThresholdPolicy(t=t, p=mid), stat)
        gap = value - target
        if abs(gap) < best_gap:
            best_p, best_gap = mid, abs(gap)
        if abs(gap) <= tolerance:
            logger.debug(f"Bisection at t={t} converged after {iteration + 1} iterations")
            break
        if gap < 0:
            lo = mid
        else:
            hi = mid
        if 0.5 * (lo + hi) in (lo, hi):
            logger.debug(f"Bisection at t={t} reached float resolution, gap {best_gap:.3e}")
            break
    else:
        raise ConvergenceError(
            f"Tie-break bisection at t={t} did not converge in {max_iterations} iterations"
        )
    return best_p


def calibrate(
    inst: Instance,
    stat: DemandStatistic,
    target: float,
    tolerance: float | None = None,
) -> ThresholdPolicy:
    """
    Solve statistic_value(inst, (t, p), stat) = target.

    Candidate thresholds are the distinct atom values in descending order. The
    statistic is constant in t between atoms and monotone in p at an atom, so
    the scan locates the bracketing atom and bisection on p finishes the job.
    A target met with p = 0 returns that atom with p = 0.

    Args:
        inst: Problem instance
        stat: Statistic to calibrate (acceptance_rate is rejected)
        target: Desired statistic value
        tolerance: Fixed-point tolerance; defaults to settings.calibration_tolerance

    Returns:
        Calibrated ThresholdPolicy

    Raises:
        UnsupportedStatisticError: For acceptance_rate
        UnattainableTargetError: When target lies outside the attainable range
    """
    if stat.kind is StatisticKind.ACCEPTANCE_RATE:
        raise UnsupportedStatisticError(
            "acceptance_rate is decreasing in the thresholds' demand and is not a calibration statistic"
        )
    tolerance = settings.calibration_tolerance if tolerance is None else tolerance
    thresholds = atom_values(inst)[::-1]

    low = statistic_value(inst, ThresholdPolicy(t=float(thresholds[0]), p=0.0), stat)
    high = statistic_value(inst, ThresholdPolicy(t=float(thresholds[-1]), p=1.0), stat)
    if target < low - tolerance or target > high + tolerance:
        raise UnattainableTargetError(stat.kind.value, target, low, high)

    previous = -np.inf
    for j, atom in enumerate(thresholds):
        t = float(atom)
        at_zero = statistic_value(inst, ThresholdPolicy(t=t, p=0.0), stat)
        at_one = statistic_value(inst, ThresholdPolicy(t=t, p=1.0), stat)
        if at_zero < previous - 1e-12 or at_one < at_zero - 1e-12:
            raise CalibrationError(
                f"{stat.kind.value} is not monotone along the threshold scan at t={t}"
            )
        previous = at_one
        if abs(at_zero - target) <= tolerance:
            logger.debug(f"Target {target} met at atom t={t} with p=0")
            return ThresholdPolicy(t=t, p=0.0)
        if target < at_one - tolerance:
            logger.debug(f"Target {target} bracketed at t={t}: [{at_zero}, {at_one}]")
            p = _bisect_tie_break(
                inst,
                t,
                stat,
                target,
                tolerance,
                settings.bisection_max_iterations,
            )
            return ThresholdPolicy(t=t, p=p)
        if j == len(thresholds) - 1:
            return ThresholdPolicy(t=t, p=1.0)
    raise UnattainableTargetError(stat.kind.value, target, low, high)


def calibrate_for_target(inst: Instance, kind: StatisticKind) -> ThresholdPolicy:
    """Calibrate the statistic to its designated target for the instance's supply."""
    stat = DemandStatistic(kind=kind, k=inst.k)
    return calibrate(inst, stat, target_for(kind, inst.k))
