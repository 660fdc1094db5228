"""Tests for exact performance, simulation, prophet and LP benchmarks."""

import itertools

import numpy as np
import pytest
from numpy.testing import assert_allclose

from prophet_thresholds.domain.exceptions import EnumerationCapError, ValidationError
from prophet_thresholds.domain.models import (
    Instance,
    ProphetMode,
    StatisticKind,
    ThresholdPolicy,
    ValueDistribution,
)
from prophet_thresholds.services.calibration import calibrate_for_target
from prophet_thresholds.services.evaluation import (
    default_prophet,
    exact_performance,
    guarantee_report,
    lp_relaxation,
)
from prophet_thresholds.services.instances import (
    example_demand_bad,
    example_hard_iid,
    iid_instance,
    random_corpus,
    surplus_mass,
)
from prophet_thresholds.services.probcore import ar, gamma, w_constant
from prophet_thresholds.services.prophet import (
    EnumerationProphet,
    LayeredProphet,
    MonteCarloProphet,
    prophet_value,
)
from prophet_thresholds.services.simulation import (
    PolicySimulator,
    run_blocks,
    simulate_performance,
)


def deterministic(value: float) -> ValueDistribution:
    return ValueDistribution.from_pairs([(value, 1.0)])


class TestAllocationIdentity:
    @pytest.mark.parametrize("n", range(1, 9))
    def test_min_demand_split(self, n):
        for bits in itertools.product((0, 1), repeat=n):
            total = sum(bits)
            for k in range(1, 7):
                allocated = sum(b * ar(k, total - b) for b in bits)
                assert allocated == pytest.approx(min(total, k), abs=1e-12)


class TestExactPerformance:
    def test_four_ones(self, four_ones, half_policy):
        assert exact_performance(four_ones, half_policy) == pytest.approx(1.625)

    def test_nothing_eligible(self, corpus):
        for inst in corpus[:5]:
            assert exact_performance(inst, ThresholdPolicy(t=100.0, p=1.0)) == 0.0

    def test_single_applicant_always_accepted(self):
        inst = iid_instance(1, 1, deterministic(5.0))
        assert exact_performance(inst, ThresholdPolicy(t=0.0, p=0.0)) == pytest.approx(5.0)

    def test_matches_enumeration_of_arrivals(self):
        # Two applicants, k=1: whoever is eligible and arrives first wins.
        a = ValueDistribution.from_pairs([(1.0, 0.5), (3.0, 0.5)])
        b = ValueDistribution.from_pairs([(2.0, 0.4), (4.0, 0.6)])
        inst = Instance(k=1, dists=(a, b))
        pol = ThresholdPolicy(t=2.0, p=0.5)
        total = 0.0
        for (va, ma), (vb, mb) in itertools.product(
            [(1.0, 0.5), (3.0, 0.5)], [(2.0, 0.4), (4.0, 0.6)]
        ):
            qa = 1.0 if va > 2.0 else 0.0
            qb = 1.0 if vb > 2.0 else 0.5
            total += ma * mb * (
                qa * (1 - qb) * va + qb * (1 - qa) * vb + qa * qb * 0.5 * (va + vb)
            )
        assert exact_performance(inst, pol) == pytest.approx(total)

    def test_lower_bound_certificate(self, corpus):
        for inst in corpus:
            for t in np.unique(np.concatenate([d.values for d in inst.dists]))[:3]:
                report = guarantee_report(inst, ThresholdPolicy(t=float(t), p=0.5))
                assert report.performance >= report.performance_lower_bound - 1e-9


class TestSimulation:
    def test_four_ones_oracle(self, four_ones, half_policy):
        estimate = simulate_performance(four_ones, half_policy, trials=200_000, seed=1)
        assert abs(estimate.estimate - 1.625) <= 4 * estimate.std_error

    def test_all_accepted(self):
        inst = Instance(k=3, dists=(deterministic(1.0), deterministic(2.0), deterministic(4.0)))
        estimate = simulate_performance(inst, ThresholdPolicy(t=0.0, p=1.0), trials=500, seed=0)
        assert estimate.estimate == pytest.approx(7.0)
        assert estimate.std_error == pytest.approx(0.0, abs=1e-12)

    def test_reproducible(self, corpus):
        pol = ThresholdPolicy(t=1.0, p=0.3)
        first = simulate_performance(corpus[0], pol, trials=1, seed=9)
        second = simulate_performance(corpus[0], pol, trials=1, seed=9)
        assert first == second

    def test_independent_of_thread_count(self, corpus):
        pol = ThresholdPolicy(t=2.0, p=0.5)
        serial = PolicySimulator(block_size=256, threads=1).run(corpus[1], pol, 5000, seed=3)
        parallel = PolicySimulator(block_size=256, threads=4).run(corpus[1], pol, 5000, seed=3)
        assert serial == parallel

    def test_block_order(self):
        def sampler(rng, size):
            return np.full(size, float(size))

        outcomes = run_blocks(sampler, trials=10, seed=0, block_size=4, threads=2)
        assert_allclose(outcomes, [4.0] * 8 + [2.0] * 2)

    def test_rejects_zero_trials(self, four_ones, half_policy):
        with pytest.raises(ValidationError):
            simulate_performance(four_ones, half_policy, trials=0, seed=0)

    @pytest.mark.slow
    def test_agrees_with_exact_on_corpus(self):
        for seed, inst in enumerate(random_corpus(50)):
            pol = calibrate_for_target(inst, StatisticKind.EXPECTED_UTILIZATION)
            estimate = simulate_performance(inst, pol, trials=100_000, seed=seed)
            assert abs(estimate.estimate - exact_performance(inst, pol)) <= 4 * estimate.std_error + 1e-12


class TestProphet:
    def test_demand_bad_single_unit(self):
        estimate = prophet_value(example_demand_bad(1, 0.5))
        assert estimate.value == pytest.approx(2.25)
        assert estimate.std_error is None
        assert estimate.mode is ProphetMode.EXACT

    def test_everything_in_top_k(self):
        inst = Instance(k=4, dists=(deterministic(1.0), deterministic(2.5)))
        assert prophet_value(inst).value == pytest.approx(3.5)

    def test_layered_matches_enumeration(self, corpus):
        for inst in corpus:
            exact = EnumerationProphet().estimate(inst).value
            assert LayeredProphet().estimate(inst).value == pytest.approx(exact, rel=1e-12, abs=1e-12)

    def test_enumeration_cap(self):
        inst = example_hard_iid(1, 30)
        with pytest.raises(EnumerationCapError):
            EnumerationProphet(cap=1000).estimate(inst)

    def test_default_falls_back_to_sampling(self):
        estimate = default_prophet(example_hard_iid(1, 30))
        assert estimate.mode is ProphetMode.MONTE_CARLO
        assert estimate.std_error is not None

    def test_monte_carlo_within_error(self, corpus):
        inst = corpus[2]
        exact = EnumerationProphet().estimate(inst).value
        sampled = MonteCarloProphet(trials=50_000, seed=4).estimate(inst)
        assert abs(sampled.value - exact) <= 4 * sampled.std_error + 1e-12

    def test_hard_instance_lower_bound(self):
        n = 10_000
        estimate = prophet_value(example_hard_iid(1, n), ProphetMode.MONTE_CARLO, trials=100_000, seed=0)
        w = w_constant(1)
        assert estimate.value >= 1 + w - (1 + w) / (n + 1) - 4 * estimate.std_error

    def test_unknown_mode(self, four_ones):
        with pytest.raises(ValueError):
            prophet_value(four_ones, "oracle")


class TestLpRelaxation:
    def test_slack_capacity(self):
        lp = lp_relaxation(iid_instance(1, 1, deterministic(5.0)))
        assert lp.value == pytest.approx(5.0)
        assert lp.weights == pytest.approx((1.0,))
        assert lp.dual == 0.0

    def test_marginal_atom_split(self):
        lp = lp_relaxation(iid_instance(1, 2, deterministic(1.0)))
        assert lp.value == pytest.approx(1.0)
        assert lp.weights == pytest.approx((0.5, 0.5))
        assert lp.dual == 1.0

    def test_demand_bad_single_unit(self):
        lp = lp_relaxation(example_demand_bad(1, 0.5))
        assert lp.value == pytest.approx(2.5)
        assert lp.value >= prophet_value(example_demand_bad(1, 0.5)).value

    def test_weights_feasible(self, corpus):
        for inst in corpus:
            lp = lp_relaxation(inst)
            assert all(0.0 <= x <= 1.0 + 1e-12 for x in lp.weights)
            assert sum(lp.weights) <= inst.k + 1e-12

    def test_benchmark_ordering(self, corpus, rng):
        for inst in corpus:
            prophet = prophet_value(inst).value
            lp = lp_relaxation(inst).value
            assert prophet <= lp + 1e-9
            for t in rng.uniform(0.0, 10.0, size=20):
                assert lp <= t * inst.k + surplus_mass(inst, float(t)) + 1e-9


class TestGuaranteeReport:
    def test_utilization_policy_meets_gamma(self, corpus):
        for inst in corpus:
            pol = calibrate_for_target(inst, StatisticKind.EXPECTED_UTILIZATION)
            report = guarantee_report(inst, pol)
            assert report.ratio_lp >= gamma(inst.k) - 1e-9
            assert report.ratio_prophet >= gamma(inst.k) - 1e-9

    def test_ratio_lp_above_lb_bound(self, corpus, rng):
        for inst in corpus:
            pol = ThresholdPolicy(t=float(rng.uniform(0.0, 10.0)), p=float(rng.uniform()))
            report = guarantee_report(inst, pol)
            assert report.ratio_lp >= report.lb_bound - 1e-9

    def test_nothing_eligible(self, four_ones):
        report = guarantee_report(four_ones, ThresholdPolicy(t=3.0))
        assert report.performance == 0.0
        assert report.ratio_prophet == 0.0
        assert report.ratio_lp == 0.0

    def test_demand_policy_utilization_dominates(self, corpus):
        for inst in corpus:
            pol = calibrate_for_target(inst, StatisticKind.EXPECTED_DEMAND)
            report = guarantee_report(inst, pol)
            assert report.expected_demand == pytest.approx(inst.k, abs=1e-9)
            assert report.expected_ut >= report.expected_ar - 1e-9

    def test_supplied_prophet_is_used(self, four_ones, half_policy):
        prophet = prophet_value(four_ones, ProphetMode.LAYERED)
        report = guarantee_report(four_ones, half_policy, prophet)
        assert report.prophet_mode is ProphetMode.LAYERED
        assert report.prophet == pytest.approx(2.0)
