"""
Problem Instances.

Eligibility and surplus at a threshold, the two worst-case instance families
and seeded random instances.
"""

import logging
import math

import numpy as np

from prophet_thresholds.domain.exceptions import ValidationError
from prophet_thresholds.domain.models import (
    EligibilitySummary,
    Instance,
    ThresholdPolicy,
    ValueDistribution,
)
from prophet_thresholds.services.probcore import check_supply, w_constant

logger = logging.getLogger("prophet_thresholds.instances")

# Candidate atom values for random instances; a shared grid produces ties across applicants.
RANDOM_VALUE_GRID = np.arange(1, 21) * 0.5


# =============================================================================
# Eligibility & Surplus
# =============================================================================


def distribution_eligibility(dist: ValueDistribution, pol: ThresholdPolicy) -> tuple[float, float]:
    """
    Eligibility probability and eligible value mass of one applicant.

    Args:
        dist: Applicant's value distribution
        pol: Threshold policy

    Returns:
        (q, m) with q = P(V > t) + p P(V = t) and m = E[V 1(V > t)] + p t P(V = t)
    """
    above = math.fsum(a.mass for a in dist.atoms if a.value > pol.t)
    value_above = math.fsum(a.value * a.mass for a in dist.atoms if a.value > pol.t)
    at = math.fsum(a.mass for a in dist.atoms if a.value == pol.t)
    q = min(1.0, above + pol.p * at)
    m = value_above + pol.p * pol.t * at
    return q, m


def eligibility(inst: Instance, pol: ThresholdPolicy) -> EligibilitySummary:
    """Per-applicant eligibility probabilities and eligible value masses."""
    q = np.empty(inst.n)
    m = np.empty(inst.n)
    seen: dict[int, tuple[float, float]] = {}
    for i, dist in enumerate(inst.dists):
        key = id(dist)
        if key not in seen:
            seen[key] = distribution_eligibility(dist, pol)
        q[i], m[i] = seen[key]
    return EligibilitySummary(q=q, m=m)


def surplus_mass(inst: Instance, t: float) -> float:
    """U(t, F) = sum_i E[max(V_i - t, 0)]."""
    if t < 0:
        raise ValidationError(f"Threshold must be nonnegative, got t={t!r}")
    return math.fsum(
        max(a.value - t, 0.0) * a.mass for dist in inst.dists for a in dist.atoms
    )


def atom_values(inst: Instance) -> np.ndarray:
    """Distinct atom values across all applicants, ascending."""
    return np.unique(np.concatenate([dist.values for dist in inst.dists]))


# =============================================================================
# Instance Families
# =============================================================================


def with_supply(inst: Instance, k: int) -> Instance:
    """The same applicants with supply k."""
    return Instance(k=k, dists=inst.dists)


def iid_instance(k: int, n: int, dist: ValueDistribution) -> Instance:
    """n applicants sharing one value distribution."""
    check_supply(k)
    if n < 1:
        raise ValidationError(f"Need at least one applicant, got n={n}")
    return Instance(k=k, dists=(dist,) * n)


def example_hard_iid(k: int, n: int) -> Instance:
    """
    IID instance on which no static threshold beats gamma_k by much.

    Each value is n*W_k with probability 1/n^2 and 1 otherwise. With n = 1 the
    rare value is certain.
    """
    check_supply(k)
    if n < k:
        raise ValidationError(f"Need n >= k, got n={n}, k={k}")
    if n == 1:
        return iid_instance(k, 1, ValueDistribution.from_pairs([(w_constant(k), 1.0)]))
    rare = 1.0 / n**2
    dist = ValueDistribution.from_pairs([(1.0, 1.0 - rare), (n * w_constant(k), rare)])
    return iid_instance(k, n, dist)


def example_demand_bad(k: int, eps: float) -> Instance:
    """
    k near-certain unit values plus one rare value 1/eps^2.

    Calibrating expected demand to k accepts every positive value here, which
    caps the ratio near k/(k+1).
    """
    check_supply(k)
    if not 0.0 < eps < 1.0:
        raise ValidationError(f"eps must lie in (0, 1), got {eps!r}")
    common = ValueDistribution.from_pairs([(0.0, eps / k), (1.0, 1.0 - eps / k)])
    rare = ValueDistribution.from_pairs([(0.0, 1.0 - eps), (1.0 / eps**2, eps)])
    return Instance(k=k, dists=(common,) * k + (rare,))


def random_instance(seed: int, n_max: int, atoms_max: int, k_max: int) -> Instance:
    """
    Reproducible pseudo-random instance.

    Args:
        seed: Seed for numpy's default generator
        n_max: Maximum number of applicants
        atoms_max: Maximum atoms per applicant
        k_max: Maximum supply (also capped by n)

    Returns:
        Instance with values on a half-integer grid in [0.5, 10]
    """
    if min(n_max, atoms_max, k_max) < 1:
        raise ValidationError("Random instance bounds must be at least 1")
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, n_max + 1))
    dists = []
    for _ in range(n):
        a = int(rng.integers(1, min(atoms_max, len(RANDOM_VALUE_GRID)) + 1))
        values = np.sort(rng.choice(RANDOM_VALUE_GRID, size=a, replace=False))
        raw = rng.uniform(0.05, 1.0, size=a)
        dists.append(ValueDistribution.from_pairs(zip(values, raw / raw.sum(), strict=True)))
    k = int(rng.integers(1, min(k_max, n) + 1))
    logger.debug(f"Random instance seed={seed}: n={n}, k={k}")
    return Instance(k=k, dists=tuple(dists))


def random_corpus(size: int, n_max: int = 8, atoms_max: int = 4, k_max: int = 4) -> list[Instance]:
    """Instances for seeds 0..size-1."""
    return [random_instance(seed, n_max, atoms_max, k_max) for seed in range(size)]
