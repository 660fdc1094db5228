"""
Domain Models for Prophet Thresholds.

Pydantic data models shared by the calibration, evaluation, optimization
and verification services.
"""

import math
from decimal import Decimal
from enum import Enum
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_serializer, model_validator

MASS_TOLERANCE = 1e-12


def decimal_string(x: float) -> str:
    """Render a float as a plain decimal string that parses back to the same float."""
    return format(Decimal(repr(float(x))), "f")


class StatisticKind(str, Enum):
    """Demand statistics a threshold policy can be calibrated on."""

    EXPECTED_DEMAND = "expected_demand"
    EXPECTED_UTILIZATION = "expected_utilization"
    ACCEPTANCE_RATE = "acceptance_rate"
    STOCKOUT_PROBABILITY = "stockout_probability"


class ProphetMode(str, Enum):
    """How the prophet benchmark is computed."""

    EXACT = "exact"
    MONTE_CARLO = "monte_carlo"
    LAYERED = "layered"


# =============================================================================
# Problem Instances
# =============================================================================


class Atom(BaseModel):
    """One point mass of a discrete value distribution."""

    model_config = ConfigDict(frozen=True)

    value: float = Field(..., description="Value of the atom")
    mass: float = Field(..., description="Probability of the atom")

    @field_serializer("value", "mass", when_used="json")
    def _as_decimal(self, x: float) -> str:
        return decimal_string(x)


class ValueDistribution(BaseModel):
    """Discrete distribution of one applicant's value."""

    model_config = ConfigDict(frozen=True)

    atoms: tuple[Atom, ...] = Field(..., description="Atoms with strictly increasing values")

    @model_validator(mode="after")
    def _check_atoms(self) -> "ValueDistribution":
        if not self.atoms:
            raise ValueError("distribution needs at least one atom")
        previous = -math.inf
        for atom in self.atoms:
            if not math.isfinite(atom.value) or atom.value < 0:
                raise ValueError(f"atom value {atom.value!r} must be finite and nonnegative")
            if not math.isfinite(atom.mass) or atom.mass <= 0:
                raise ValueError(f"atom mass {atom.mass!r} must be positive")
            if atom.value <= previous:
                raise ValueError("atom values must be strictly increasing")
            previous = atom.value
        total = math.fsum(atom.mass for atom in self.atoms)
        if abs(total - 1.0) > MASS_TOLERANCE:
            raise ValueError(f"atom masses sum to {total!r}, expected 1")
        return self

    @classmethod
    def from_pairs(cls, pairs: Any) -> "ValueDistribution":
        """Build a distribution from (value, mass) pairs."""
        return cls(atoms=tuple(Atom(value=float(v), mass=float(m)) for v, m in pairs))

    @property
    def values(self) -> np.ndarray:
        return np.array([atom.value for atom in self.atoms], dtype=float)

    @property
    def masses(self) -> np.ndarray:
        return np.array([atom.mass for atom in self.atoms], dtype=float)

    @property
    def mean(self) -> float:
        return math.fsum(atom.value * atom.mass for atom in self.atoms)


class Instance(BaseModel):
    """Supply k plus independent value distributions, one per applicant."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    k: int = Field(..., description="Number of identical items (supply)")
    dists: tuple[ValueDistribution, ...] = Field(
        ..., alias="applicants", description="One value distribution per applicant"
    )

    @model_validator(mode="after")
    def _check_sizes(self) -> "Instance":
        if self.k < 1:
            raise ValueError(f"supply k must be at least 1, got {self.k}")
        if not self.dists:
            raise ValueError("instance needs at least one applicant")
        return self

    @property
    def n(self) -> int:
        return len(self.dists)

    def is_iid(self) -> bool:
        first = self.dists[0]
        return all(d == first for d in self.dists[1:])


class ThresholdPolicy(BaseModel):
    """Static threshold t; values equal to t are accepted with probability p."""

    model_config = ConfigDict(frozen=True)

    t: float = Field(..., ge=0, allow_inf_nan=False, description="Threshold")
    p: float = Field(default=0.0, ge=0, le=1, description="Tie-break probability at t")


class EligibilitySummary(BaseModel):
    """Per-applicant eligibility probabilities q and eligible value masses m."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    q: np.ndarray
    m: np.ndarray


# =============================================================================
# Distribution Kernels
# =============================================================================


class DemandStatistic(BaseModel):
    """A demand statistic E[g(D)] together with the supply it refers to."""

    model_config = ConfigDict(frozen=True)

    kind: StatisticKind
    k: int = Field(default=1, ge=1, description="Supply; unused by expected_demand")


class PoissonBinomial(BaseModel):
    """Exact law of a sum of independent Bernoulli variables."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    probs: np.ndarray = Field(..., description="Bernoulli means q_i")
    pmf: np.ndarray = Field(..., description="h_j = P(D = j), j = 0..n")
    cdf: np.ndarray = Field(..., description="H_j = P(D <= j)")
    mean: float = Field(..., description="Sum of the Bernoulli means")

    @property
    def n(self) -> int:
        return len(self.pmf) - 1


# =============================================================================
# Benchmarks & Reports
# =============================================================================


class LpSolution(BaseModel):
    """Optimum of the ex-ante relaxation."""

    value: float
    weights: tuple[float, ...] = Field(..., description="Acceptance probability x_i per applicant")
    dual: float = Field(..., description="Threshold price tau")


class ProphetEstimate(BaseModel):
    """Prophet benchmark value, with a standard error when sampled."""

    value: float
    std_error: float | None = None
    mode: ProphetMode


class SimulationEstimate(BaseModel):
    """Monte Carlo estimate of a policy's performance."""

    estimate: float
    std_error: float
    trials: int


class GuaranteeReport(BaseModel):
    """Performance, benchmarks, demand statistics and ratio certificates."""

    policy: ThresholdPolicy
    performance: float
    prophet: float
    prophet_std_error: float | None = None
    prophet_mode: ProphetMode
    lp: float
    expected_ut: float
    expected_ar: float
    expected_demand: float
    ratio_prophet: float
    ratio_lp: float
    lb_bound: float = Field(..., description="min(E[UT], E[AR]), a lower bound on ratio_lp")
    performance_lower_bound: float = Field(..., description="t*k*E[UT] + U(t)*E[AR]")
    benchmark_upper_bound: float = Field(..., description="t*k + U(t), an upper bound on lp")


# =============================================================================
# Bernoulli Optimization
# =============================================================================


class BernoulliProgram(BaseModel):
    """Minimize E[f(D_p)] over p in [0,1]^n subject to E[g(D_p)] = phi."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=1)
    f: tuple[float, ...]
    g: tuple[float, ...]
    phi: float

    @model_validator(mode="after")
    def _check_tables(self) -> "BernoulliProgram":
        for name, table in (("f", self.f), ("g", self.g)):
            if len(table) != self.n + 1:
                raise ValueError(f"{name} needs {self.n + 1} entries, got {len(table)}")
            if not all(math.isfinite(x) for x in table):
                raise ValueError(f"{name} has non-finite entries")
        if not math.isfinite(self.phi):
            raise ValueError("phi must be finite")
        return self


class BruteForceResult(BaseModel):
    """Grid-search optimum of a Bernoulli program."""

    value: float
    argmin: tuple[float, ...]
    slack: float = Field(..., description="Constraint violation at the reported point")
    grid_step: float


class StructuredResult(BaseModel):
    """Optimum over vectors with `ones` entries at 1 and `mids` entries at a common p."""

    value: float
    ones: int
    mids: int
    p: float
    violation: float


class RootResult(BaseModel):
    """Objective value at the common probability solving the constraint."""

    value: float
    p_root: float


class DemandMinimum(BaseModel):
    """Minimum over m of E[AR_k(Bin(m, k/m))]."""

    value: float
    argmin_m: int


class TwoOptProblem(BaseModel):
    """Minimize B0 + B1(p1+p2) + B2 p1 p2 s.t. A0 + A1(p1+p2) + A2 p1 p2 = phi."""

    model_config = ConfigDict(frozen=True)

    A0: float
    A1: float
    A2: float
    B0: float
    B1: float
    B2: float
    phi: float


class TwoOptSolution(BaseModel):
    """Global minimum of a two-variable problem and the proof case that produced it."""

    value: float
    p1: float
    p2: float
    case_tag: str


# =============================================================================
# Verification
# =============================================================================


class CurveSeries(BaseModel):
    """E[AR_k(Bin(n, k/n))] for n = k..n_max."""

    k: int
    n: tuple[int, ...]
    values: tuple[float, ...]
    minimum: float
    argmin: int


class InfimumResult(BaseModel):
    """Infimum over n of E[AR_k(Bin(n, k/n))]; argmin None means the n -> infinity limit."""

    k: int
    value: float
    argmin: int | None
    curve_minimum: float
    curve_argmin: int


class VarphiTable(BaseModel):
    """varphi_k(k + l) rounded to 4 decimals; rows indexed by k, columns by l."""

    k_values: tuple[int, ...]
    l_values: tuple[int, ...]
    values: tuple[tuple[float, ...], ...]


class SweepResult(BaseModel):
    """Best static threshold ratio on the hard IID instance."""

    k: int
    n: int
    best_ratio: float
    best_accept_prob: float
    prophet: float
    prophet_std_error: float
    envelope: float = Field(..., description="Upper bound on the best ratio, sampling slack included")
    prophet_lower_bound: float
    accept_probs: tuple[float, ...]
    performances: tuple[float, ...]


class DemandBadResult(BaseModel):
    """Demand-calibrated policy on the k/(k+1) instance."""

    k: int
    eps: float
    policy: ThresholdPolicy
    performance: float
    prophet: float
    ratio: float


class WitnessReport(BaseModel):
    """Instance on which a fixed expected-demand target falls short of gamma_k."""

    k: int
    phi: float
    branch: str
    n: int
    instance: Instance
    policy: ThresholdPolicy
    ratio: float
    gamma_k: float
    conclusive: bool


class IidCheckReport(BaseModel):
    """Demand calibration on an IID instance against gamma_k."""

    k: int
    n: int
    policy: ThresholdPolicy
    performance: float
    prophet: float
    ratio: float
    gamma_k: float
    binomial_utilization: float = Field(..., description="E[min(Bin(n,k/n),k)]/k")
    holds: bool
    simulated: SimulationEstimate | None = None


class UtCurvePoint(BaseModel):
    """Guarantee min(a, Phi(AR, UT, a)) at utilization level a."""

    level: float
    bound: float
    ar_value: float
    p_root: float


class StockoutProbeReport(BaseModel):
    """Ratios of stockout-calibrated policies against the LP benchmark."""

    k: int
    target: float
    ratios: tuple[float, ...]
    skipped: tuple[int, ...]
    min_ratio_lp: float | None
    flagged: tuple[int, ...] = Field(..., description="Corpus positions with ratio below gamma_k")


class CheckResult(BaseModel):
    """Outcome of one verification check."""

    name: str
    passed: bool
    detail: str
    seconds: float


class VerificationSummary(BaseModel):
    """All verification checks of one run."""

    passed: bool
    fast: bool
    checks: list[CheckResult]
