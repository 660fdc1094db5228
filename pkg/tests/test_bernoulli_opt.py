"""Tests for Bernoulli program solvers."""

import numpy as np
import pydantic
import pytest

from prophet_thresholds.domain.exceptions import (
    InfeasibleProgramError,
    ProgramTooLargeError,
    ValidationError,
)
from prophet_thresholds.domain.models import BernoulliProgram, TwoOptProblem
from prophet_thresholds.services.bernoulli_opt import (
    binomial_program,
    lipschitz_slack,
    phi_ar_demand,
    phi_ar_ut,
    phi_brute,
    phi_structured,
    two_opt_solve,
    utilization_root,
)
from prophet_thresholds.services.probcore import binomial_ut, gamma


def two_opt(a, b, phi) -> TwoOptProblem:
    return TwoOptProblem(A0=a[0], A1=a[1], A2=a[2], B0=b[0], B1=b[1], B2=b[2], phi=phi)


class TestPrograms:
    def test_tables(self):
        prog = binomial_program(3, "ar", "ut", 2, 0.5)
        assert prog.f == pytest.approx((1.0, 1.0, 2.0 / 3.0, 0.5))
        assert prog.g == pytest.approx((0.0, 0.5, 1.0, 1.0))

    def test_unknown_table(self):
        with pytest.raises(ValidationError):
            binomial_program(3, "ar", "median", 2, 0.5)

    def test_table_length_checked(self):
        with pytest.raises(pydantic.ValidationError):
            BernoulliProgram(n=2, f=(1.0, 0.5), g=(0.0, 1.0, 1.0), phi=1.0)


class TestBruteForce:
    def test_single_variable(self):
        result = phi_brute(binomial_program(1, "ar", "demand", 1, 0.5), 0.05)
        assert result.value == pytest.approx(0.75)
        assert result.argmin == pytest.approx((0.5,))
        assert result.slack == pytest.approx(0.0, abs=1e-12)

    def test_full_utilization(self):
        result = phi_brute(binomial_program(2, "ar", "ut", 1, 1.0), 0.05)
        assert result.value == pytest.approx(1.0 / 3.0)
        assert result.argmin == pytest.approx((1.0, 1.0))

    def test_unreachable_target_reports_slack(self):
        result = phi_brute(binomial_program(2, "ar", "demand", 1, 3.0), 0.05)
        assert result.slack == pytest.approx(1.0)
        assert result.argmin == pytest.approx((1.0, 1.0))

    def test_too_many_variables(self):
        with pytest.raises(ProgramTooLargeError):
            phi_brute(binomial_program(6, "ar", "ut", 2, 0.5), 0.05)

    def test_unsupported_step(self):
        with pytest.raises(ValidationError):
            phi_brute(binomial_program(2, "ar", "ut", 1, 0.5), 0.03)


class TestStructured:
    def test_full_utilization(self):
        result = phi_structured(binomial_program(2, "ar", "ut", 1, 1.0))
        assert result.value == pytest.approx(1.0 / 3.0)
        assert (result.ones, result.mids) == (2, 0)

    def test_interior_common_probability(self):
        result = phi_structured(binomial_program(2, "ar", "ut", 1, 0.75))
        assert result.violation <= 1e-9
        assert result.value <= phi_ar_ut(2, 1, 0.75).value + 1e-9

    def test_infeasible(self):
        with pytest.raises(InfeasibleProgramError):
            phi_structured(binomial_program(2, "ar", "ut", 1, 1.5))

    @pytest.mark.parametrize(
        ("n", "f", "g", "k", "phi"),
        [
            (3, "ar", "ut", 1, 0.6),
            (3, "ar", "ut", 2, 0.8),
            (3, "ar", "demand", 2, 2.0),
            (2, "ut", "ar", 1, 0.7),
        ],
    )
    def test_agrees_with_grid(self, n, f, g, k, phi):
        prog = binomial_program(n, f, g, k, phi)
        structured = phi_structured(prog)
        brute = phi_brute(prog, 0.05)
        assert brute.slack <= 1e-9
        assert structured.violation <= 1e-9
        assert structured.value <= brute.value + 1e-6

    def test_random_tables(self, rng):
        for _ in range(5):
            f = rng.uniform(-1.0, 1.0, size=4)
            g = rng.uniform(-1.0, 1.0, size=4)
            prog = BernoulliProgram(n=3, f=tuple(f), g=tuple(g), phi=float(rng.uniform(g.min(), g.max())))
            brute = phi_brute(prog, 0.05)
            if brute.slack > 1e-9:
                continue
            structured = phi_structured(prog)
            assert structured.value <= brute.value + lipschitz_slack(prog, 0.05) + 1e-9


class TestClosedForms:
    def test_ar_ut_example(self):
        result = phi_ar_ut(2, 1, 0.75)
        assert result.p_root == pytest.approx(0.5, abs=1e-12)
        assert result.value == pytest.approx(7.0 / 12.0)

    @pytest.mark.parametrize("phi", [0.0, 1.0, -0.2])
    def test_ar_ut_rejects_target(self, phi):
        with pytest.raises(ValidationError):
            phi_ar_ut(4, 2, phi)

    def test_ar_ut_needs_more_applicants_than_supply(self):
        with pytest.raises(ValidationError):
            phi_ar_ut(2, 2, 0.5)

    @pytest.mark.parametrize(("n", "k"), [(2, 1), (10, 3), (50, 7), (400, 20)])
    def test_utilization_root(self, n, k):
        p = utilization_root(n, k)
        assert p <= k / n + 1e-12
        assert binomial_ut(n, k, p) == pytest.approx(gamma(k), abs=1e-12)

    def test_ar_demand_single_unit(self):
        result = phi_ar_demand(20, 1)
        assert result.value == pytest.approx(0.5)
        assert result.argmin_m == 1

    def test_ar_demand_three_units(self):
        result = phi_ar_demand(40, 3)
        assert result.value == pytest.approx(0.75)
        assert result.argmin_m == 3

    def test_ar_ut_approaches_gamma(self):
        result = phi_ar_ut(1000, 1, gamma(1))
        assert result.value == pytest.approx(gamma(1), abs=5e-4)
        assert result.value >= gamma(1)

    def test_ar_demand_approaches_gamma(self):
        result = phi_ar_demand(2000, 5)
        assert result.value == pytest.approx(gamma(5), abs=1e-3)
        assert result.argmin_m == 2000

    @pytest.mark.slow
    def test_ar_ut_large_population(self):
        assert phi_ar_ut(10_000, 1, gamma(1)).value == pytest.approx(gamma(1), abs=5e-4)

    @pytest.mark.slow
    def test_ar_demand_large_population(self):
        result = phi_ar_demand(100_000, 5)
        assert result.value == pytest.approx(gamma(5), abs=1e-3)
        assert result.argmin_m == 100_000

    def test_ar_demand_rejects_small_n(self):
        with pytest.raises(ValidationError):
            phi_ar_demand(2, 3)


class TestTwoVariable:
    def test_linear_constraint(self):
        solution = two_opt_solve(two_opt((0.0, 1.0, 0.0), (0.0, 0.0, -1.0), 1.0))
        assert solution.value == pytest.approx(-0.25)
        assert (solution.p1, solution.p2) == pytest.approx((0.5, 0.5))
        assert solution.case_tag == "1b"

    def test_linear_constraint_corner_optimum(self):
        solution = two_opt_solve(two_opt((0.0, 1.0, 0.0), (0.0, 0.0, 1.0), 1.0))
        assert solution.value == pytest.approx(0.0)
        assert (solution.p1, solution.p2) == pytest.approx((0.0, 1.0))

    def test_vacuous_constraint(self):
        solution = two_opt_solve(two_opt((0.0, 0.0, 0.0), (0.0, 1.0, 0.0), 0.0))
        assert solution.value == 0.0
        assert (solution.p1, solution.p2) == (0.0, 0.0)
        assert solution.case_tag == "1a"

    def test_product_constraint(self):
        solution = two_opt_solve(two_opt((0.0, 0.0, 1.0), (0.0, 1.0, 0.0), 0.25))
        assert solution.value == pytest.approx(1.0)
        assert (solution.p1, solution.p2) == pytest.approx((0.5, 0.5))
        assert solution.case_tag == "2b"

    def test_infeasible(self):
        with pytest.raises(InfeasibleProgramError):
            two_opt_solve(two_opt((0.0, 1.0, 0.0), (0.0, 1.0, 0.0), 3.0))

    def test_matches_grid_search(self, rng):
        for _ in range(200):
            a = rng.uniform(-1.0, 1.0, size=3)
            b = rng.uniform(-1.0, 1.0, size=3)
            x, y = rng.uniform(size=2)
            phi = float(a[0] + a[1] * (x + y) + a[2] * x * y)
            solution = two_opt_solve(two_opt(a, b, phi))
            p1, p2 = solution.p1, solution.p2
            assert a[0] + a[1] * (p1 + p2) + a[2] * p1 * p2 == pytest.approx(phi, abs=1e-8)
            for s in np.linspace(0.0, 1.0, 401):
                slope = a[1] + a[2] * s
                if abs(slope) < 1e-6:
                    continue
                t = (phi - a[0] - a[1] * s) / slope
                if 0.0 <= t <= 1.0:
                    assert solution.value <= b[0] + b[1] * (s + t) + b[2] * s * t + 1e-9
