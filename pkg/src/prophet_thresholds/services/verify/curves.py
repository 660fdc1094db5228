"""
Guarantee Curves.

Closed-form series behind the tight guarantees: the acceptance-rate curve,
its infimum, varphi tables, the derivative bound and the utilization curve.
"""

import logging
from collections.abc import Iterable, Sequence

import numpy as np
from scipy import stats

from prophet_thresholds.config.settings import settings
from prophet_thresholds.domain.exceptions import ValidationError
from prophet_thresholds.domain.models import (
    CurveSeries,
    InfimumResult,
    UtCurvePoint,
    VarphiTable,
)
from prophet_thresholds.services.bernoulli_opt import phi_ar_ut
from prophet_thresholds.services.probcore import (
    binomial_ar_curve,
    check_supply,
    gamma,
    poisson_mode_mass,
)
from prophet_thresholds.services.verify.reference import VARPHI_K_VALUES, VARPHI_L_VALUES

logger = logging.getLogger("prophet_thresholds.verify.curves")


def ar_curve(k: int, n_max: int) -> CurveSeries:
    """E[AR_k(Bin(n, k/n))] for n = k..n_max with its minimum."""
    check_supply(k)
    if n_max < k:
        raise ValidationError(f"Need n_max >= k, got n_max={n_max}, k={k}")
    n = np.arange(k, n_max + 1)
    values = binomial_ar_curve(k, n)
    i = int(np.argmin(values))
    return CurveSeries(
        k=k,
        n=tuple(int(x) for x in n),
        values=tuple(float(v) for v in values),
        minimum=float(values[i]),
        argmin=int(n[i]),
    )


def infimum_ar(k: int, n_cap: int = 5000) -> InfimumResult:
    """
    Infimum over n >= k of E[AR_k(Bin(n, k/n))].

    The curve is evaluated up to n_cap and the tail is replaced by its limit
    gamma_k; argmin is None when the limit is the smaller of the two.
    """
    curve = ar_curve(k, n_cap)
    limit = gamma(k)
    if curve.minimum <= limit:
        value, argmin = curve.minimum, curve.argmin
    else:
        value, argmin = limit, None
    return InfimumResult(
        k=k, value=value, argmin=argmin, curve_minimum=curve.minimum, curve_argmin=curve.argmin
    )


def varphi(k: int, n: int) -> float:
    """varphi_k(n) = (1 - k/(n+1)) P[Bin(n, k/n) = k] + 1/(2(n+1))."""
    check_supply(k)
    if n < k:
        raise ValidationError(f"Need n >= k, got n={n}, k={k}")
    return float((1.0 - k / (n + 1)) * stats.binom.pmf(k, n, k / n) + 1.0 / (2 * (n + 1)))


def varphi_table(
    k_range: Sequence[int] = VARPHI_K_VALUES,
    l_range: Sequence[int] = VARPHI_L_VALUES,
) -> VarphiTable:
    """varphi_k(k + l) over the grid, rounded to 4 decimals."""
    rows = tuple(tuple(round(varphi(k, k + ell), 4) for ell in l_range) for k in k_range)
    return VarphiTable(k_values=tuple(k_range), l_values=tuple(l_range), values=rows)


def deriv_rhs(k: int, n: float) -> float:
    """k (e^{-k} k^k / k!) (1 - 1/n - 1/(n-k) - 1/(n(n-k))) - 1."""
    if n < k + 2:
        raise ValidationError(f"Need n >= k + 2, got n={n}, k={k}")
    return k * poisson_mode_mass(k) * (1.0 - 1.0 / n - 1.0 / (n - k) - 1.0 / (n * (n - k))) - 1.0


def ut_guarantee_curve(
    k: int,
    grid: Iterable[float],
    n_large: int | None = None,
) -> list[UtCurvePoint]:
    """
    Guarantee of a policy calibrated to expected utilization a, for each level a.

    Args:
        k: Supply
        grid: Utilization levels in (0, 1)
        n_large: Binomial size standing in for n -> infinity; defaults to settings.large_n

    Returns:
        One point per level with bound = min(a, E[AR_k(Bin(n, p_a))])
    """
    n_large = n_large or settings.large_n
    points = []
    for level in grid:
        root = phi_ar_ut(n_large, k, float(level))
        points.append(
            UtCurvePoint(
                level=float(level),
                bound=min(float(level), root.value),
                ar_value=root.value,
                p_root=root.p_root,
            )
        )
    return points


def gamma_series(k_max: int) -> list[tuple[int, float, float]]:
    """(k, gamma_k, min(gamma_k, k/(k+1))) for k = 1..k_max."""
    check_supply(k_max)
    return [(k, gamma(k), min(gamma(k), k / (k + 1))) for k in range(1, k_max + 1)]
