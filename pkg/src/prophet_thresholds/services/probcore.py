"""
Distribution Kernels.

Exact Poisson, Binomial and Poisson-Binomial computations plus the scalar
functions gamma_k, W_k, UT_k and AR_k used throughout the package.
"""

import logging
import math
from collections.abc import Sequence

import numpy as np
from scipy import stats
from scipy.special import gammaln

from prophet_thresholds.config.settings import settings
from prophet_thresholds.domain.exceptions import InvalidSupplyError, ValidationError
from prophet_thresholds.domain.models import DemandStatistic, PoissonBinomial, StatisticKind

logger = logging.getLogger("prophet_thresholds.probcore")


def check_supply(k: int) -> None:
    """Reject anything that is not a positive integer supply."""
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)) or k < 1:
        raise InvalidSupplyError(k)


# =============================================================================
# Scalar Constants
# =============================================================================


def poisson_mode_mass(k: int) -> float:
    """e^{-k} k^k / k!, assembled in log space."""
    check_supply(k)
    return math.exp(-k + k * math.log(k) - float(gammaln(k + 1)))


def gamma(k: int) -> float:
    """Tight guarantee gamma_k = 1 - e^{-k} k^k / k!."""
    check_supply(k)
    return -math.expm1(-k + k * math.log(k) - float(gammaln(k + 1)))


def poisson_pmf(lam: float, tail: float | None = None) -> np.ndarray:
    """
    Poisson pmf on {0..m}, m the smallest integer with P(Pois(lam) > m) < tail.

    Args:
        lam: Poisson mean (nonnegative)
        tail: Truncation level; defaults to settings.poisson_tail

    Returns:
        Array of point masses
    """
    if not math.isfinite(lam) or lam < 0:
        raise ValidationError(f"Poisson mean must be finite and nonnegative, got {lam!r}")
    if lam == 0:
        return np.ones(1)
    tail = settings.poisson_tail if tail is None else tail
    guess = stats.poisson.isf(tail, lam)
    m = int(guess) if math.isfinite(guess) else int(lam + 40 * math.sqrt(lam) + 40)
    m = max(m - 1, 0)
    while stats.poisson.sf(m, lam) >= tail:
        m += 1
    logger.debug(f"Poisson({lam}) truncated at m={m}")
    return stats.poisson.pmf(np.arange(m + 1), lam)


def poisson_tail_ge(lam: float, k: int) -> float:
    """P(Pois(lam) >= k)."""
    return float(stats.poisson.sf(k - 1, lam))


def w_constant(k: int) -> float:
    """W_k = k * P(Pois(k) < k) / P(Pois(k) > k)."""
    check_supply(k)
    pmf = poisson_pmf(float(k))
    below = math.fsum(pmf[:k])
    above = math.fsum(pmf[k + 1 :])
    return k * below / above


def le_cam_lower_bound(k: int, n: int) -> float:
    """Lower bound gamma_k - 2k/n^2 on E[AR_k(Bin(n, k/n))]."""
    return gamma(k) - 2.0 * k / n**2


# =============================================================================
# Utilization & Acceptance Rate
# =============================================================================


def ut(k: int, d: int) -> float:
    """Fraction of the k items allocated when d applicants are eligible."""
    return min(1.0, d / k)


def ar(k: int, d: int) -> float:
    """Chance an eligible applicant is served against d eligible competitors."""
    return min(1.0, k / (d + 1))


def ut_table(k: int, n: int) -> np.ndarray:
    return np.minimum(1.0, np.arange(n + 1) / k)


def ar_table(k: int, n: int) -> np.ndarray:
    return np.minimum(1.0, k / (np.arange(n + 1) + 1.0))


def statistic_table(stat: DemandStatistic, n: int) -> np.ndarray:
    """Tabulate g(j) for j = 0..n."""
    k = stat.k
    match stat.kind:
        case StatisticKind.EXPECTED_DEMAND:
            return np.arange(n + 1, dtype=float)
        case StatisticKind.EXPECTED_UTILIZATION:
            return ut_table(k, n)
        case StatisticKind.ACCEPTANCE_RATE:
            return ar_table(k, n)
        case StatisticKind.STOCKOUT_PROBABILITY:
            return (np.arange(n + 1) >= k).astype(float)
    raise ValidationError(f"Unknown statistic kind {stat.kind!r}")


# =============================================================================
# Poisson-Binomial
# =============================================================================


def grouped_pmf(values: np.ndarray, counts: np.ndarray) -> np.ndarray:
    """Poisson-Binomial pmf when counts[g] items share probability values[g]."""
    pmf = np.ones(1)
    for v, c in zip(values, counts, strict=True):
        c = int(c)
        if v == 0.0:
            pmf = np.concatenate([pmf, np.zeros(c)])
        elif v == 1.0:
            pmf = np.concatenate([np.zeros(c), pmf])
        elif c == 1:
            nxt = np.zeros(len(pmf) + 1)
            nxt[:-1] = pmf * (1.0 - v)
            nxt[1:] += pmf * v
            pmf = nxt
        else:
            pmf = np.convolve(pmf, stats.binom.pmf(np.arange(c + 1), c, v))
    return np.clip(pmf, 0.0, None)


def poisson_binomial(q: Sequence[float] | np.ndarray) -> PoissonBinomial:
    """
    Exact law of a sum of independent Bernoulli(q_i) variables.

    Items sharing a probability are convolved as one binomial block, so the
    dynamic program costs O(n^2) at worst and O(n) for identical items.

    Args:
        q: Bernoulli means, each in [0, 1]

    Returns:
        PoissonBinomial with pmf, cdf and mean
    """
    probs = np.array(q, dtype=float).ravel()
    if np.any(~np.isfinite(probs)) or np.any(probs < 0.0) or np.any(probs > 1.0):
        raise ValidationError("Bernoulli means must lie in [0, 1]")
    values, counts = np.unique(probs, return_counts=True)
    pmf = grouped_pmf(values, counts)
    cdf = np.cumsum(pmf)
    for arr in (probs, pmf, cdf):
        arr.setflags(write=False)
    return PoissonBinomial(probs=probs, pmf=pmf, cdf=cdf, mean=math.fsum(probs))


def expect_statistic(d: PoissonBinomial, stat: DemandStatistic) -> float:
    """E[g(D)] for the statistic's g."""
    if stat.kind is StatisticKind.EXPECTED_DEMAND:
        return d.mean
    if stat.kind is StatisticKind.STOCKOUT_PROBABILITY:
        return math.fsum(d.pmf[stat.k :])
    return float(d.pmf @ statistic_table(stat, d.n))


def poisson_expectation(lam: float, stat: DemandStatistic) -> float:
    """E[g(Pois(lam))] over the truncated support."""
    if stat.kind is StatisticKind.EXPECTED_DEMAND:
        return lam
    pmf = poisson_pmf(lam)
    return float(pmf @ statistic_table(stat, len(pmf) - 1))


# =============================================================================
# Binomial Closed Forms
# =============================================================================


def binomial_ut(n: int, k: int, p: float) -> float:
    """E[UT_k(Bin(n, p))] = sum_{j<k} P(Bin(n,p) > j) / k."""
    if p <= 0.0:
        return 0.0
    if p >= 1.0:
        return ut(k, n)
    return float(np.sum(stats.binom.sf(np.arange(k), n, p)) / k)


def binomial_ar(n: int, k: int, p: float) -> float:
    """E[AR_k(Bin(n, p))] = P(Bin(n,p) < k) + k/((n+1)p) * P(Bin(n+1,p) > k)."""
    if p <= 0.0:
        return 1.0
    if p >= 1.0:
        return ar(k, n)
    below = stats.binom.cdf(k - 1, n, p)
    above = stats.binom.sf(k, n + 1, p)
    return float(below + k / ((n + 1) * p) * above)


def binomial_ar_closed(n: int, k: int) -> float:
    """E[AR_k(Bin(n, k/n))] in closed form."""
    check_supply(k)
    if n < k:
        raise ValidationError(f"Need n >= k, got n={n}, k={k}")
    return float(binomial_ar_curve(k, np.array([n]))[0])


def binomial_ar_curve(k: int, n_values: np.ndarray) -> np.ndarray:
    """Vectorized binomial_ar_closed over an array of n >= k."""
    m = np.asarray(n_values, dtype=np.int64)
    p = k / m
    values = stats.binom.cdf(k - 1, m, p) + m / (m + 1.0) * stats.binom.sf(k, m + 1, p)
    return np.where(m == k, k / (k + 1.0), values)


def binomial_ar_alternative(n: int, k: int) -> float:
    """1 - P[B>k]/(n+1) - (1 - k/(n+1)) P[B=k] with B ~ Bin(n, k/n)."""
    p = k / n
    return float(
        1.0
        - stats.binom.sf(k, n, p) / (n + 1)
        - (1.0 - k / (n + 1)) * stats.binom.pmf(k, n, p)
    )
