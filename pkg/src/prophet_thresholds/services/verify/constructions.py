"""
Worst-Case Constructions.

Instances that pin the guarantees down from above, and checks of the
expected-demand policy on them.
"""

import logging
from collections.abc import Sequence

import numpy as np

from prophet_thresholds.config.settings import settings
from prophet_thresholds.domain.exceptions import (
    NonIidInstanceError,
    UnattainableTargetError,
    ValidationError,
)
from prophet_thresholds.domain.models import (
    DemandBadResult,
    DemandStatistic,
    IidCheckReport,
    Instance,
    ProphetMode,
    StatisticKind,
    StockoutProbeReport,
    SweepResult,
    ThresholdPolicy,
    ValueDistribution,
    WitnessReport,
)
from prophet_thresholds.services.calibration import calibrate
from prophet_thresholds.services.evaluation import (
    exact_performance,
    lp_relaxation,
    performance_from_groups,
)
from prophet_thresholds.services.instances import (
    atom_values,
    distribution_eligibility,
    eligibility,
    example_demand_bad,
    example_hard_iid,
    iid_instance,
    with_supply,
)
from prophet_thresholds.services.probcore import (
    binomial_ut,
    check_supply,
    expect_statistic,
    gamma,
    poisson_binomial,
    poisson_tail_ge,
    w_constant,
)
from prophet_thresholds.services.prophet import (
    EnumerationProphet,
    MonteCarloProphet,
    joint_outcomes,
    prophet_value,
)
from prophet_thresholds.services.simulation import simulate_performance

logger = logging.getLogger("prophet_thresholds.verify.constructions")

WITNESS_SIZES = (100, 1000, 10_000)
DEMAND_BAD_EPS = 1e-3
RATIO_SLACK = 1e-9


def _demand(target_k: int) -> DemandStatistic:
    return DemandStatistic(kind=StatisticKind.EXPECTED_DEMAND, k=target_k)


# =============================================================================
# Hard IID Instance
# =============================================================================


def example1_envelope(k: int, n: int) -> float:
    """gamma_k + 2 k W_k (n^{-2/3} + n^{-1/3})."""
    check_supply(k)
    return gamma(k) + 2 * k * w_constant(k) * (n ** (-2.0 / 3.0) + n ** (-1.0 / 3.0))


def prophet_lower_bound(k: int, n: int) -> float:
    """k + W_k - (1 + W_k)/(n + 1), a lower bound on the hard instance's prophet value."""
    w = w_constant(k)
    return k + w - (1.0 + w) / (n + 1)


def hard_instance_sweep(
    k: int,
    n: int,
    mc_trials: int,
    seed: int,
    grid_points: int = 201,
) -> SweepResult:
    """
    Best static threshold on the hard IID instance.

    Rare high values are always worth accepting, so the sweep only varies
    the acceptance probability p of the common value 1. Performance is exact;
    the prophet is sampled and its error widens the envelope.

    Args:
        k: Supply
        n: Number of applicants
        mc_trials: Monte Carlo trials for the prophet
        seed: Monte Carlo seed
        grid_points: Number of acceptance probabilities in [0, 1]

    Returns:
        SweepResult with the best ratio and its envelope
    """
    inst = example_hard_iid(k, n)
    dist = inst.dists[0]
    accept_probs = np.linspace(0.0, 1.0, grid_points)
    performances = []
    for p in accept_probs:
        q, m = distribution_eligibility(dist, ThresholdPolicy(t=1.0, p=float(p)))
        performances.append(
            performance_from_groups(k, np.array([q]), np.array([m * n]), np.array([n]))
        )
    prophet = MonteCarloProphet(trials=mc_trials, seed=seed).estimate(inst)
    std_error = prophet.std_error or 0.0
    ratios = np.asarray(performances) / prophet.value
    best = int(np.argmax(ratios))
    envelope = example1_envelope(k, n) + 4.0 * std_error / prophet.value
    logger.info(
        f"Hard instance k={k}, n={n}: best ratio {ratios[best]:.6f} at p={accept_probs[best]:.3f}, "
        f"envelope {envelope:.6f}"
    )
    return SweepResult(
        k=k,
        n=n,
        best_ratio=float(ratios[best]),
        best_accept_prob=float(accept_probs[best]),
        prophet=prophet.value,
        prophet_std_error=std_error,
        envelope=envelope,
        prophet_lower_bound=prophet_lower_bound(k, n),
        accept_probs=tuple(float(p) for p in accept_probs),
        performances=tuple(float(v) for v in performances),
    )


# =============================================================================
# Expected-Demand Policy
# =============================================================================


def demand_bad_sweep(k: int, eps: float) -> DemandBadResult:
    """Demand-calibrated policy on the instance whose ratio tends to k/(k+1)."""
    if not 0.0 < eps < 0.1:
        raise ValidationError(f"eps must lie in (0, 0.1), got {eps!r}")
    inst = example_demand_bad(k, eps)
    pol = calibrate(inst, _demand(k), float(k))
    performance = exact_performance(inst, pol)
    prophet = EnumerationProphet().estimate(inst).value
    return DemandBadResult(
        k=k, eps=eps, policy=pol, performance=performance, prophet=prophet, ratio=performance / prophet
    )


def _witness(k: int, phi: float, branch: str, inst: Instance, pol: ThresholdPolicy) -> WitnessReport:
    performance = exact_performance(inst, pol)
    prophet = prophet_value(inst, ProphetMode.LAYERED).value
    ratio = performance / prophet
    return WitnessReport(
        k=k,
        phi=phi,
        branch=branch,
        n=inst.n,
        instance=inst,
        policy=pol,
        ratio=ratio,
        gamma_k=gamma(k),
        conclusive=ratio < gamma(k) - RATIO_SLACK,
    )


def _deterministic_witness(k: int, phi: float, n: int) -> WitnessReport:
    inst = iid_instance(k, n, ValueDistribution.from_pairs([(1.0, 1.0)]))
    return _witness(k, phi, "deterministic", inst, calibrate(inst, _demand(k), phi))


def _rare_value_witness(k: int, phi: float, n: int) -> WitnessReport:
    zero = ValueDistribution.from_pairs([(0.0, 1.0)])
    rare = ValueDistribution.from_pairs([(0.0, 1.0 - 1.0 / n), (float(n), 1.0 / n)])
    inst = Instance(k=k, dists=(zero,) * (n - 1) + (rare,))
    return _witness(k, phi, "rare_value", inst, calibrate(inst, _demand(k), phi))


def fixed_demand_insufficiency(
    k: int,
    phi: float,
    sizes: Sequence[int] = WITNESS_SIZES,
) -> WitnessReport:
    """
    Instance on which calibrating expected demand to phi falls below gamma_k.

    phi < k uses n deterministic unit values, phi > k uses one rare value
    among zeros, phi = k uses the k/(k+1) instance. The first conclusive
    size wins; otherwise the last size tried is reported.
    """
    check_supply(k)
    if k >= 5:
        raise ValidationError(f"Only k <= 4 has a demand-insufficiency witness, got k={k}")
    if phi <= 0.0:
        raise ValidationError(f"phi must be positive, got {phi!r}")

    if phi == k:
        inst = example_demand_bad(k, DEMAND_BAD_EPS)
        return _witness(k, phi, "demand_bad", inst, calibrate(inst, _demand(k), phi))

    build = _deterministic_witness if phi < k else _rare_value_witness
    report = None
    for n in sizes:
        if n < max(k, phi):
            continue
        report = build(k, phi, n)
        if report.conclusive:
            break
    if report is None:
        raise ValidationError(f"No witness size accommodates phi={phi!r}")
    logger.info(f"Witness for k={k}, phi={phi}: {report.branch} n={report.n} ratio={report.ratio:.6f}")
    return report


def iid_demand_check(
    k: int,
    n: int,
    dist: ValueDistribution | Sequence[ValueDistribution],
    trials: int = 0,
    seed: int = 0,
) -> IidCheckReport:
    """
    Demand-calibrated policy on an IID instance against gamma_k.

    Args:
        k: Supply, at most n
        n: Number of applicants
        dist: The shared distribution, or one distribution per applicant (all equal)
        trials: Monte Carlo trials of the policy; 0 skips simulation
        seed: Simulation seed

    Returns:
        IidCheckReport

    Raises:
        NonIidInstanceError: When the given distributions differ
    """
    check_supply(k)
    if n < k:
        raise ValidationError(f"Need n >= k, got n={n}, k={k}")
    if not isinstance(dist, ValueDistribution):
        dists = list(dist)
        if len(dists) != n or any(d != dists[0] for d in dists):
            raise NonIidInstanceError("Expected n identical value distributions")
        dist = dists[0]
    inst = iid_instance(k, n, dist)
    pol = calibrate(inst, _demand(k), float(k))
    performance = exact_performance(inst, pol)
    mode = ProphetMode.EXACT if joint_outcomes(inst) <= settings.enumeration_cap else ProphetMode.LAYERED
    prophet = prophet_value(inst, mode).value
    ratio = performance / prophet if prophet > 0.0 else 1.0
    utilization = binomial_ut(n, k, k / n)
    simulated = simulate_performance(inst, pol, trials, seed) if trials > 0 else None
    return IidCheckReport(
        k=k,
        n=n,
        policy=pol,
        performance=performance,
        prophet=prophet,
        ratio=ratio,
        gamma_k=gamma(k),
        binomial_utilization=utilization,
        holds=ratio >= gamma(k) - RATIO_SLACK and utilization >= gamma(k) - 1e-12,
        simulated=simulated,
    )


# =============================================================================
# Stockout Calibration
# =============================================================================


def stockout_conjecture_probe(k: int, corpus: Sequence[Instance]) -> StockoutProbeReport:
    """Calibrate P(D >= k) to P(Pois(k) >= k) on each instance and compare to the LP."""
    check_supply(k)
    target = poisson_tail_ge(k, k)
    stat = DemandStatistic(kind=StatisticKind.STOCKOUT_PROBABILITY, k=k)
    ratios = []
    skipped = []
    flagged = []
    for position, inst in enumerate(corpus):
        inst_k = with_supply(inst, k)
        try:
            pol = calibrate(inst_k, stat, target)
        except UnattainableTargetError:
            skipped.append(position)
            continue
        lp = lp_relaxation(inst_k).value
        ratio = exact_performance(inst_k, pol) / lp if lp > 0.0 else 1.0
        ratios.append(ratio)
        if ratio < gamma(k) - RATIO_SLACK:
            flagged.append(position)
    if flagged:
        logger.warning(f"Stockout calibration fell below gamma_{k} on corpus positions {flagged}")
    return StockoutProbeReport(
        k=k,
        target=target,
        ratios=tuple(ratios),
        skipped=tuple(skipped),
        min_ratio_lp=min(ratios) if ratios else None,
        flagged=tuple(flagged),
    )


# =============================================================================
# Policies Between Demand and Utilization
# =============================================================================


def policies_between(
    inst: Instance,
    first: ThresholdPolicy,
    second: ThresholdPolicy,
    per_atom: int = 5,
) -> list[ThresholdPolicy]:
    """
    Policies on the path from first to second, both included.

    Policies are ordered by how much they accept: higher t first, then
    larger p at the same t. Each atom in between contributes per_atom
    tie-break probabilities.
    """
    def position(pol: ThresholdPolicy) -> tuple[float, float]:
        return (-pol.t, pol.p)

    lo, hi = sorted((first, second), key=position)
    grid = np.linspace(0.0, 1.0, per_atom)
    path = [lo]
    for atom in atom_values(inst)[::-1]:
        for p in grid:
            candidate = ThresholdPolicy(t=float(atom), p=float(p))
            if position(lo) < position(candidate) < position(hi):
                path.append(candidate)
    path.append(hi)
    return path


def policy_interval_check(inst: Instance, per_atom: int = 5) -> float:
    """
    Smallest min(E[UT], E[AR]) over policies between the demand and utilization policies.

    For k >= 5 every such policy guarantees gamma_k against the LP.
    """
    if inst.k < 5:
        raise ValidationError(f"The interval guarantee needs k >= 5, got k={inst.k}")
    demand_pol = calibrate(inst, _demand(inst.k), float(inst.k))
    ut_pol = calibrate(
        inst, DemandStatistic(kind=StatisticKind.EXPECTED_UTILIZATION, k=inst.k), gamma(inst.k)
    )
    ut_stat = DemandStatistic(kind=StatisticKind.EXPECTED_UTILIZATION, k=inst.k)
    ar_stat = DemandStatistic(kind=StatisticKind.ACCEPTANCE_RATE, k=inst.k)
    bounds = []
    for pol in policies_between(inst, demand_pol, ut_pol, per_atom):
        law = poisson_binomial(eligibility(inst, pol).q)
        bounds.append(min(expect_statistic(law, ut_stat), expect_statistic(law, ar_stat)))
    return min(bounds)
