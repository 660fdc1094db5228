"""
Policy Evaluation.

Exact performance of static threshold policies, the ex-ante LP benchmark and
guarantee reports that tie both to the prophet's value.
"""

import logging
import math

import numpy as np

from prophet_thresholds.config.settings import settings
from prophet_thresholds.domain.models import (
    DemandStatistic,
    GuaranteeReport,
    Instance,
    LpSolution,
    ProphetEstimate,
    ProphetMode,
    StatisticKind,
    ThresholdPolicy,
)
from prophet_thresholds.services.instances import eligibility, surplus_mass
from prophet_thresholds.services.probcore import (
    ar_table,
    expect_statistic,
    grouped_pmf,
    poisson_binomial,
)
from prophet_thresholds.services.prophet import joint_outcomes, prophet_value

logger = logging.getLogger("prophet_thresholds.evaluation")


# =============================================================================
# Exact Performance
# =============================================================================


def performance_from_groups(
    k: int,
    q_values: np.ndarray,
    m_totals: np.ndarray,
    counts: np.ndarray,
) -> float:
    """
    Sum over groups of (group's eligible mass) * E[AR_k(D_{-i})].

    Applicants in a group share the eligibility probability q_values[g], so
    they share the leave-one-out law. Each law is convolved from scratch.
    """
    q_values = np.asarray(q_values, dtype=float)
    counts = np.asarray(counts, dtype=np.int64)
    terms = []
    for g, mass in enumerate(m_totals):
        if mass <= 0.0:
            continue
        rest = counts.copy()
        rest[g] -= 1
        pmf = grouped_pmf(q_values, rest)
        terms.append(float(mass) * float(pmf @ ar_table(k, len(pmf) - 1)))
    return math.fsum(terms)


def exact_performance(inst: Instance, pol: ThresholdPolicy) -> float:
    """ST_k of the policy: sum_i m_i E[AR_k(D_{-i})]."""
    summary = eligibility(inst, pol)
    q_values, inverse, counts = np.unique(summary.q, return_inverse=True, return_counts=True)
    m_totals = np.array(
        [math.fsum(summary.m[inverse == g]) for g in range(len(q_values))]
    )
    return performance_from_groups(inst.k, q_values, m_totals, counts)


# =============================================================================
# Ex-ante LP
# =============================================================================


def lp_relaxation(inst: Instance) -> LpSolution:
    """
    Water-filling optimum of the ex-ante relaxation.

    Accept quantile mass from the top value down until k units of expected
    demand are used; applicants tied at the marginal value tau share the
    remainder in proportion to their mass at tau.
    """
    owner = np.concatenate([np.full(len(d.atoms), i) for i, d in enumerate(inst.dists)])
    values = np.concatenate([d.values for d in inst.dists])
    masses = np.concatenate([d.masses for d in inst.dists])
    positive = values > 0.0

    if math.fsum(masses[positive]) <= inst.k:
        weights = np.bincount(owner[positive], weights=masses[positive], minlength=inst.n)
        value = math.fsum(values * masses)
        return LpSolution(value=value, weights=tuple(float(w) for w in weights), dual=0.0)

    levels = np.unique(values[positive])[::-1]
    above = 0.0
    tau = float(levels[-1])
    for level in levels:
        at_mass = math.fsum(masses[values == level])
        if above + at_mass >= inst.k:
            tau = float(level)
            break
        above += at_mass
    at = values == tau
    higher = values > tau
    remainder = inst.k - above
    at_total = math.fsum(masses[at])

    weights = np.bincount(owner[higher], weights=masses[higher], minlength=inst.n)
    weights += remainder * np.bincount(owner[at], weights=masses[at], minlength=inst.n) / at_total
    value = math.fsum(values[higher] * masses[higher]) + remainder * tau
    logger.debug(f"LP price tau={tau}, remainder={remainder}")
    return LpSolution(value=value, weights=tuple(float(w) for w in weights), dual=tau)


# =============================================================================
# Guarantee Reports
# =============================================================================


def _ratio(numerator: float, benchmark: float) -> float:
    return numerator / benchmark if benchmark > 0.0 else 1.0


def default_prophet(inst: Instance) -> ProphetEstimate:
    """Exact enumeration within the cap, Monte Carlo beyond it."""
    if joint_outcomes(inst) <= settings.enumeration_cap:
        return prophet_value(inst, ProphetMode.EXACT)
    logger.info(f"Instance with n={inst.n} exceeds the enumeration cap; sampling the prophet")
    return prophet_value(inst, ProphetMode.MONTE_CARLO)


def guarantee_report(
    inst: Instance,
    pol: ThresholdPolicy,
    prophet: ProphetEstimate | None = None,
) -> GuaranteeReport:
    """
    Performance, benchmarks, demand statistics and ratio certificates.

    Args:
        inst: Problem instance
        pol: Threshold policy
        prophet: Precomputed prophet value; computed by default_prophet when omitted

    Returns:
        GuaranteeReport for the pair
    """
    summary = eligibility(inst, pol)
    law = poisson_binomial(summary.q)
    expected_ut = expect_statistic(law, DemandStatistic(kind=StatisticKind.EXPECTED_UTILIZATION, k=inst.k))
    expected_ar = expect_statistic(law, DemandStatistic(kind=StatisticKind.ACCEPTANCE_RATE, k=inst.k))
    performance = exact_performance(inst, pol)
    prophet = prophet or default_prophet(inst)
    lp = lp_relaxation(inst).value
    surplus = surplus_mass(inst, pol.t)

    return GuaranteeReport(
        policy=pol,
        performance=performance,
        prophet=prophet.value,
        prophet_std_error=prophet.std_error,
        prophet_mode=prophet.mode,
        lp=lp,
        expected_ut=expected_ut,
        expected_ar=expected_ar,
        expected_demand=law.mean,
        ratio_prophet=_ratio(performance, prophet.value),
        ratio_lp=_ratio(performance, lp),
        lb_bound=min(expected_ut, expected_ar),
        performance_lower_bound=pol.t * inst.k * expected_ut + surplus * expected_ar,
        benchmark_upper_bound=pol.t * inst.k + surplus,
    )
