"""
Verification Suite.

Runs every numeric claim the library certifies as a named check and collects
the outcomes into a VerificationSummary. The fast profile shrinks corpora and
sample sizes; the full profile runs them at publication scale.
"""

import itertools
import logging
import time
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from prophet_thresholds.domain.exceptions import ProphetThresholdsError, UnattainableTargetError
from prophet_thresholds.domain.models import (
    BernoulliProgram,
    CheckResult,
    DemandStatistic,
    StatisticKind,
    VerificationSummary,
)
from prophet_thresholds.services.bernoulli_opt import (
    lipschitz_slack,
    phi_brute,
    phi_structured,
    utilization_root,
)
from prophet_thresholds.services.calibration import calibrate_for_target
from prophet_thresholds.services.evaluation import exact_performance, guarantee_report
from prophet_thresholds.services.instances import eligibility, random_corpus, with_supply
from prophet_thresholds.services.probcore import (
    ar,
    binomial_ar_alternative,
    binomial_ar_closed,
    binomial_ut,
    expect_statistic,
    gamma,
    poisson_binomial,
    poisson_expectation,
    poisson_pmf,
)
from prophet_thresholds.services.prophet import prophet_value
from prophet_thresholds.services.simulation import simulate_performance
from prophet_thresholds.services.verify.constructions import (
    demand_bad_sweep,
    hard_instance_sweep,
    policy_interval_check,
    stockout_conjecture_probe,
)
from prophet_thresholds.services.verify.curves import (
    deriv_rhs,
    infimum_ar,
    ut_guarantee_curve,
    varphi_table,
)
from prophet_thresholds.services.verify.reference import VARPHI_REFERENCE

logger = logging.getLogger("prophet_thresholds.verify.suite")

TOLERANCE = 1e-9

CheckFn = Callable[["SuiteProfile"], tuple[bool, str]]


@dataclass(frozen=True)
class SuiteProfile:
    """Corpus sizes and sample counts for one run."""

    corpus_size: int
    pb_vectors: int
    programs: int
    oracle_instances: int
    oracle_trials: int
    hard_n: int
    hard_trials: int
    k_max_infimum: int
    closed_form_n: int
    root_n: int


FAST = SuiteProfile(
    corpus_size=40,
    pb_vectors=100,
    programs=10,
    oracle_instances=5,
    oracle_trials=20_000,
    hard_n=1000,
    hard_trials=20_000,
    k_max_infimum=12,
    closed_form_n=100,
    root_n=60,
)

FULL = SuiteProfile(
    corpus_size=200,
    pb_vectors=500,
    programs=100,
    oracle_instances=50,
    oracle_trials=100_000,
    hard_n=10_000,
    hard_trials=100_000,
    k_max_infimum=30,
    closed_form_n=500,
    root_n=200,
)


def _stat(kind: StatisticKind, k: int) -> DemandStatistic:
    return DemandStatistic(kind=kind, k=k)


# =============================================================================
# Identities
# =============================================================================


def check_gamma_identity(profile: SuiteProfile) -> tuple[bool, str]:
    worst = 0.0
    for k in range(1, 51):
        for kind in (StatisticKind.EXPECTED_UTILIZATION, StatisticKind.ACCEPTANCE_RATE):
            worst = max(worst, abs(poisson_expectation(k, _stat(kind, k)) - gamma(k)))
    return worst <= 1e-10, f"max deviation {worst:.3g} for k <= 50"


def check_poisson_identity(profile: SuiteProfile) -> tuple[bool, str]:
    worst = 0.0
    for k in range(1, 21):
        for lam in (0.5, 1.0, float(k), 3.0 * k):
            pmf = poisson_pmf(lam)
            below = float(pmf[:k].sum())
            above = float(pmf[k + 1 :].sum())
            middle = lam * below + k * above
            ut_side = k * poisson_expectation(lam, _stat(StatisticKind.EXPECTED_UTILIZATION, k))
            ar_side = lam * poisson_expectation(lam, _stat(StatisticKind.ACCEPTANCE_RATE, k))
            worst = max(worst, abs(ut_side - middle), abs(ar_side - middle))
    return worst <= 1e-10, f"max deviation {worst:.3g}"


def check_allocation_identity(profile: SuiteProfile) -> tuple[bool, str]:
    """min(D, k) equals sum_i D_i AR_k(D - D_i) over every 0/1 vector."""
    for n in range(1, 13):
        for bits in itertools.product((0, 1), repeat=n):
            total = sum(bits)
            for k in range(1, 7):
                allocated = sum(b * ar(k, total - b) for b in bits)
                if not np.isclose(allocated, min(total, k), rtol=0.0, atol=1e-12):
                    return False, f"fails at {bits}, k={k}"
    return True, "holds for every vector of length <= 12 and k <= 6"


def check_closed_forms(profile: SuiteProfile) -> tuple[bool, str]:
    worst = 0.0
    for k in range(1, 11):
        for n in range(k, profile.closed_form_n + 1):
            closed = binomial_ar_closed(n, k)
            law = poisson_binomial(np.full(n, k / n))
            direct = expect_statistic(law, _stat(StatisticKind.ACCEPTANCE_RATE, k))
            worst = max(worst, abs(closed - direct), abs(closed - binomial_ar_alternative(n, k)))
    return worst <= 1e-12, f"max deviation {worst:.3g}"


def check_utilization_root(profile: SuiteProfile) -> tuple[bool, str]:
    for k in range(1, 11):
        for n in range(k + 1, profile.root_n + 1):
            if utilization_root(n, k) > k / n + 1e-12:
                return False, f"p_(n,k) exceeds k/n at n={n}, k={k}"
            if binomial_ut(n, k, k / n) < gamma(k) - 1e-12:
                return False, f"E[UT_k(Bin(n,k/n))] below gamma_k at n={n}, k={k}"
    return True, f"holds for k <= 10, n <= {profile.root_n}"


# =============================================================================
# Poisson-Binomial Facts
# =============================================================================


def check_poisson_binomial(profile: SuiteProfile) -> tuple[bool, str]:
    rng = np.random.default_rng(2024)
    for trial in range(profile.pb_vectors):
        q = rng.uniform(0.0, 1.0, size=int(rng.integers(1, 13)))
        law = poisson_binomial(q)
        h, cdf = law.pmf, law.cdf
        support = np.flatnonzero(h > 0.0)
        if not np.array_equal(support, np.arange(support[0], support[-1] + 1)):
            return False, f"support has gaps for vector {trial}"
        for j in range(1, law.n):
            if h[j] ** 2 - h[j - 1] * h[j + 1] < -1e-14 * h[j] ** 2:
                return False, f"log-concavity fails at j={j} for vector {trial}"
        # Ties between the two candidate modes make argmax ambiguous.
        candidates = {int(np.floor(law.mean)), min(int(np.ceil(law.mean)), law.n)}
        if max(h[c] for c in candidates) < h.max() * (1.0 - 1e-12):
            return False, f"mode far from mean {law.mean:.3f} for vector {trial}"
        for j in range(2, law.n + 1):
            if cdf[j - 2] * h[j - 1] > cdf[j - 1] * h[j - 2] * (1.0 + 1e-12):
                return False, f"hazard inequality fails at j={j} for vector {trial}"
    return True, f"{profile.pb_vectors} vectors"


# =============================================================================
# Curves & Tables
# =============================================================================


def check_varphi_table(profile: SuiteProfile) -> tuple[bool, str]:
    table = varphi_table()
    for k, row in zip(table.k_values, table.values, strict=True):
        expected = VARPHI_REFERENCE[k]
        if any(abs(a - b) > 1e-9 for a, b in zip(row, expected, strict=True)):
            return False, f"row k={k} differs from the reference table"
        if any(b < a for a, b in itertools.pairwise(row)):
            return False, f"row k={k} is not nondecreasing"
    return True, f"{len(table.k_values) * len(table.l_values)} entries match"


def check_infimum_identity(profile: SuiteProfile) -> tuple[bool, str]:
    for k in range(1, profile.k_max_infimum + 1):
        result = infimum_ar(k, 5000)
        target = min(k / (k + 1), gamma(k))
        if abs(result.value - target) > 1e-3:
            return False, f"infimum {result.value:.6f} vs {target:.6f} at k={k}"
        if k <= 4 and result.argmin != k:
            return False, f"argmin {result.argmin} at k={k}, expected n=k"
        if 5 <= k <= 8 and (result.curve_argmin != 5000 or abs(result.curve_minimum - gamma(k)) > 1e-3):
            return False, f"curve for k={k} does not decrease to gamma_k"
    return True, f"k <= {profile.k_max_infimum}"


def check_derivative_bound(profile: SuiteProfile) -> tuple[bool, str]:
    if not (deriv_rhs(31, 33) > 0.0 and deriv_rhs(9, 20) > 0.0):
        return False, "derivative bound not positive at the certified points"
    for k in range(1, 41):
        values = [deriv_rhs(k, n) for n in range(k + 2, k + 200)]
        if any(b < a - 1e-15 for a, b in itertools.pairwise(values)):
            return False, f"derivative bound not monotone in n for k={k}"
    return True, "positive and monotone"


def check_utilization_curve(profile: SuiteProfile) -> tuple[bool, str]:
    for k in (1, 2, 5):
        levels = np.linspace(0.05, 0.95, 19).tolist() + [gamma(k)]
        points = ut_guarantee_curve(k, levels)
        peak = max(points, key=lambda point: point.bound)
        if abs(peak.bound - gamma(k)) > 1e-3 or abs(peak.level - gamma(k)) > 1e-9:
            return False, f"utilization curve for k={k} peaks at {peak.level:.4f}"
    return True, "peaks at gamma_k"


# =============================================================================
# Policy Guarantees
# =============================================================================


def check_utilization_policy(profile: SuiteProfile) -> tuple[bool, str]:
    for position, inst in enumerate(random_corpus(profile.corpus_size)):
        pol = calibrate_for_target(inst, StatisticKind.EXPECTED_UTILIZATION)
        report = guarantee_report(inst, pol)
        floor = gamma(inst.k) * max(report.lp, report.prophet)
        if report.performance < floor - TOLERANCE:
            return False, f"ratio {report.ratio_prophet:.6f} below gamma_{inst.k} at seed {position}"
    return True, f"{profile.corpus_size} instances"


def check_demand_policy(profile: SuiteProfile) -> tuple[bool, str]:
    for position, inst in enumerate(random_corpus(profile.corpus_size)):
        pol = calibrate_for_target(inst, StatisticKind.EXPECTED_DEMAND)
        performance = exact_performance(inst, pol)
        prophet = prophet_value(inst).value
        bound = min(gamma(inst.k), inst.k / (inst.k + 1))
        if performance < bound * prophet - TOLERANCE:
            return False, f"demand policy below min(gamma_k, k/(k+1)) at seed {position}"
        law = poisson_binomial(eligibility(inst, pol).q)
        utilization = expect_statistic(law, _stat(StatisticKind.EXPECTED_UTILIZATION, inst.k))
        acceptance = expect_statistic(law, _stat(StatisticKind.ACCEPTANCE_RATE, inst.k))
        if utilization < acceptance - TOLERANCE:
            return False, f"E[UT] < E[AR] at expected demand k, seed {position}"
    return True, f"{profile.corpus_size} instances"


def check_demand_bad(profile: SuiteProfile) -> tuple[bool, str]:
    for k in range(1, 5):
        result = demand_bad_sweep(k, 1e-3)
        low = min(gamma(k), k / (k + 1)) - TOLERANCE
        if not low <= result.ratio <= k / (k + 1) + 0.01:
            return False, f"ratio {result.ratio:.6f} outside [{low:.6f}, {k / (k + 1) + 0.01:.6f}] at k={k}"
    return True, "k = 1..4 within [min(gamma_k, k/(k+1)), k/(k+1) + 0.01]"


def check_hard_instance(profile: SuiteProfile) -> tuple[bool, str]:
    result = hard_instance_sweep(1, profile.hard_n, profile.hard_trials, seed=0)
    if result.best_ratio > result.envelope:
        return False, f"best ratio {result.best_ratio:.6f} above envelope {result.envelope:.6f}"
    if result.prophet < result.prophet_lower_bound - 4.0 * result.prophet_std_error:
        return False, f"prophet {result.prophet:.6f} below its lower bound"
    return True, f"best ratio {result.best_ratio:.6f} <= {result.envelope:.6f}"


def check_structured_optimum(profile: SuiteProfile) -> tuple[bool, str]:
    rng = np.random.default_rng(7)
    checked = 0
    for _ in range(profile.programs):
        n = int(rng.integers(1, 5))
        f = rng.uniform(-1.0, 1.0, size=n + 1)
        g = rng.uniform(-1.0, 1.0, size=n + 1)
        # Every deterministic demand j is attainable, so E[g] sweeps [min g, max g].
        phi = float(rng.uniform(g.min(), g.max()))
        prog = BernoulliProgram(n=n, f=tuple(f), g=tuple(g), phi=phi)
        structured = phi_structured(prog)
        brute = phi_brute(prog, 0.02)
        if brute.slack > 1e-9:
            continue
        checked += 1
        if brute.value < structured.value - lipschitz_slack(prog, 0.02) - TOLERANCE:
            return False, f"grid beats structured optimum: {brute.value:.6f} < {structured.value:.6f}"
    if checked < max(1, profile.programs // 2):
        return False, f"only {checked} of {profile.programs} programs were feasible on the grid"
    return True, f"{checked} of {profile.programs} programs compared"


def check_simulation_oracle(profile: SuiteProfile) -> tuple[bool, str]:
    for position, inst in enumerate(random_corpus(profile.oracle_instances)):
        pol = calibrate_for_target(inst, StatisticKind.EXPECTED_UTILIZATION)
        exact = exact_performance(inst, pol)
        simulated = simulate_performance(inst, pol, profile.oracle_trials, seed=position)
        if abs(simulated.estimate - exact) > 4.0 * simulated.std_error + 1e-12:
            return False, f"simulation {simulated.estimate:.6f} vs exact {exact:.6f} at seed {position}"
        report = guarantee_report(inst, pol)
        ordered = report.prophet <= report.lp + TOLERANCE and report.lp <= report.benchmark_upper_bound + TOLERANCE
        if not ordered:
            return False, f"benchmark ordering fails at seed {position}"
    return True, f"{profile.oracle_instances} instances at {profile.oracle_trials} trials"


def check_stockout_single_unit(profile: SuiteProfile) -> tuple[bool, str]:
    report = stockout_conjecture_probe(1, random_corpus(profile.corpus_size))
    if report.flagged:
        return False, f"stockout calibration below gamma_1 at {list(report.flagged)}"
    return True, f"min ratio {report.min_ratio_lp}"


def check_interval_policies(profile: SuiteProfile) -> tuple[bool, str]:
    checked = 0
    for inst in random_corpus(profile.corpus_size, n_max=10, atoms_max=4, k_max=1):
        if inst.n < 6:
            continue
        wide = with_supply(inst, 5)
        try:
            bound = policy_interval_check(wide)
        except UnattainableTargetError:
            continue
        checked += 1
        if bound < gamma(5) - 1e-8:
            return False, f"policy between the calibrated ones has bound {bound:.6f} < gamma_5"
    return True, f"{checked} instances with k = 5"


CHECKS: tuple[tuple[str, CheckFn], ...] = (
    ("gamma_identity", check_gamma_identity),
    ("poisson_identity", check_poisson_identity),
    ("allocation_identity", check_allocation_identity),
    ("closed_forms", check_closed_forms),
    ("utilization_root", check_utilization_root),
    ("poisson_binomial_facts", check_poisson_binomial),
    ("varphi_table", check_varphi_table),
    ("infimum_identity", check_infimum_identity),
    ("derivative_bound", check_derivative_bound),
    ("utilization_curve", check_utilization_curve),
    ("utilization_policy", check_utilization_policy),
    ("demand_policy", check_demand_policy),
    ("demand_bad", check_demand_bad),
    ("hard_instance", check_hard_instance),
    ("structured_optimum", check_structured_optimum),
    ("simulation_oracle", check_simulation_oracle),
    ("stockout_single_unit", check_stockout_single_unit),
    ("interval_policies", check_interval_policies),
)


def run_suite(fast: bool = False) -> VerificationSummary:
    """
    Run every check and collect the outcomes.

    A check that raises a library error is recorded as failed with the error
    message; other exceptions propagate.
    """
    profile = FAST if fast else FULL
    results = []
    for name, check in CHECKS:
        start = time.perf_counter()
        try:
            passed, detail = check(profile)
        except ProphetThresholdsError as e:
            passed, detail = False, f"{type(e).__name__}: {e.message}"
        elapsed = time.perf_counter() - start
        level = logging.INFO if passed else logging.ERROR
        logger.log(level, f"[{'PASS' if passed else 'FAIL'}] {name} ({elapsed:.2f}s): {detail}")
        results.append(CheckResult(name=name, passed=passed, detail=detail, seconds=elapsed))
    return VerificationSummary(passed=all(r.passed for r in results), fast=fast, checks=results)
