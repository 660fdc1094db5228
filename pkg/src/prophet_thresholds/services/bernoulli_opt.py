"""
Bernoulli Optimization.

Minimize E[f(D_p)] over p in [0,1]^n subject to E[g(D_p)] = phi, where D_p is
a sum of independent Bernoulli(p_i). Includes a grid oracle, a solver over
vectors whose entries take values in {0, p, 1}, the closed-form
specializations for (AR, UT) and (AR, demand), and the two-variable problem.
"""

import itertools
import logging
import math
from collections.abc import Callable

import numpy as np
from scipy import optimize, stats

from prophet_thresholds.config.settings import settings
from prophet_thresholds.domain.exceptions import (
    ConvergenceError,
    InfeasibleProgramError,
    ProgramTooLargeError,
    ValidationError,
)
from prophet_thresholds.domain.models import (
    BernoulliProgram,
    BruteForceResult,
    DemandMinimum,
    RootResult,
    StructuredResult,
    TwoOptProblem,
    TwoOptSolution,
)
from prophet_thresholds.services.probcore import (
    ar_table,
    binomial_ar,
    binomial_ar_curve,
    binomial_ut,
    check_supply,
    gamma,
    ut_table,
)

logger = logging.getLogger("prophet_thresholds.bernoulli_opt")

BRUTE_FORCE_MAX_N = 5
BRUTE_FORCE_STEPS = (0.05, 0.02, 0.01)
TIE_TOLERANCE = 1e-12


def binomial_program(n: int, f: str, g: str, k: int, phi: float) -> BernoulliProgram:
    """
    Program with tabulated UT_k, AR_k or identity functions.

    Args:
        n: Number of Bernoulli variables
        f: Objective, one of "ut", "ar", "demand"
        g: Constraint, one of "ut", "ar", "demand"
        k: Supply used by UT and AR
        phi: Constraint target

    Returns:
        BernoulliProgram
    """
    check_supply(k)
    tables = {
        "ut": ut_table(k, n),
        "ar": ar_table(k, n),
        "demand": np.arange(n + 1, dtype=float),
    }
    if f not in tables or g not in tables:
        raise ValidationError(f"Unknown table name in f={f!r}, g={g!r}")
    return BernoulliProgram(
        n=n, f=tuple(map(float, tables[f])), g=tuple(map(float, tables[g])), phi=phi
    )


def _batched_pmf(points: np.ndarray) -> np.ndarray:
    """Poisson-Binomial pmfs for each row of a (rows, m) probability matrix."""
    rows, m = points.shape
    pmf = np.zeros((rows, m + 1))
    pmf[:, 0] = 1.0
    for c in range(m):
        p = points[:, c : c + 1]
        shifted = np.zeros_like(pmf)
        shifted[:, 1:] = pmf[:, :-1] * p
        pmf = pmf * (1.0 - p) + shifted
    return pmf


def _structured_expectation(table: np.ndarray, ones: int, mids: int, p: np.ndarray) -> np.ndarray:
    """E[table(ones + Bin(mids, p))] for an array of p."""
    i = np.arange(mids + 1)
    weights = stats.binom.pmf(i[None, :], mids, np.atleast_1d(p)[:, None])
    return weights @ table[ones : ones + mids + 1]


# =============================================================================
# Grid Oracle
# =============================================================================


def phi_brute(prog: BernoulliProgram, grid_step: float) -> BruteForceResult:
    """
    Exhaustive grid oracle for Phi_n(f, g, phi).

    The first n-1 coordinates range over the grid (sorted, by symmetry) and the
    last one is solved from the constraint, which is affine in each coordinate.
    When no grid point admits an exact completion the minimal-violation rule
    over the full grid applies instead; the violation is reported as slack.

    Args:
        prog: Program with n <= 5
        grid_step: One of 0.05, 0.02, 0.01

    Returns:
        BruteForceResult with value, argmin and slack
    """
    if prog.n > BRUTE_FORCE_MAX_N:
        raise ProgramTooLargeError(f"Brute force supports n <= {BRUTE_FORCE_MAX_N}, got n={prog.n}")
    if not any(math.isclose(grid_step, s) for s in BRUTE_FORCE_STEPS):
        raise ValidationError(f"grid_step must be one of {BRUTE_FORCE_STEPS}, got {grid_step!r}")
    size = int(round(1.0 / grid_step)) + 1
    grid = np.linspace(0.0, 1.0, size)
    combos = math.comb(size + prog.n - 2, prog.n - 1) if prog.n > 1 else 1
    if combos > settings.brute_force_cap:
        raise ProgramTooLargeError(f"Grid has {combos} points (cap {settings.brute_force_cap})")

    f = np.asarray(prog.f)
    g = np.asarray(prog.g)
    tol = settings.feasibility_tolerance
    if prog.n > 1:
        index = np.array(list(itertools.combinations_with_replacement(range(size), prog.n - 1)))
        head = grid[index]
    else:
        head = np.zeros((1, 0))
    pmf = _batched_pmf(head)
    g0, g1 = pmf @ g[:-1], pmf @ g[1:]
    f0, f1 = pmf @ f[:-1], pmf @ f[1:]
    slope = g1 - g0

    candidates_p: list[np.ndarray] = []
    candidates_row: list[np.ndarray] = []
    moving = np.abs(slope) > 1e-15
    last = np.full(len(head), np.nan)
    last[moving] = (prog.phi - g0[moving]) / slope[moving]
    solved = moving & (last >= -1e-12) & (last <= 1.0 + 1e-12)
    candidates_row.append(np.flatnonzero(solved))
    candidates_p.append(np.clip(last[solved], 0.0, 1.0))
    flat = ~moving & (np.abs(g0 - prog.phi) <= tol)
    for end in (0.0, 1.0):
        candidates_row.append(np.flatnonzero(flat))
        candidates_p.append(np.full(int(flat.sum()), end))

    rows = np.concatenate(candidates_row)
    lasts = np.concatenate(candidates_p)
    if len(rows):
        objective = f0[rows] + (f1[rows] - f0[rows]) * lasts
        violation = np.abs(g0[rows] + slope[rows] * lasts - prog.phi)
        keep = violation <= tol
        if keep.any():
            best = np.flatnonzero(keep)[np.argmin(objective[keep])]
            point = tuple(float(x) for x in head[rows[best]]) + (float(lasts[best]),)
            return BruteForceResult(
                value=float(objective[best]),
                argmin=point,
                slack=float(violation[best]),
                grid_step=grid_step,
            )

    logger.debug("No exact completion on the grid; using minimal violation")
    full = np.concatenate([np.repeat(head, size, axis=0), np.tile(grid, len(head))[:, None]], axis=1)
    pmf_full = _batched_pmf(full)
    violation = np.abs(pmf_full @ g - prog.phi)
    objective = pmf_full @ f
    least = violation.min()
    keep = np.flatnonzero(violation <= least + TIE_TOLERANCE)
    best = keep[np.argmin(objective[keep])]
    return BruteForceResult(
        value=float(objective[best]),
        argmin=tuple(float(x) for x in full[best]),
        slack=float(least),
        grid_step=grid_step,
    )


def lipschitz_slack(prog: BernoulliProgram, grid_step: float) -> float:
    """Largest change of E[f] when every coordinate moves by half a grid step."""
    steps = np.abs(np.diff(np.asarray(prog.f)))
    return prog.n * float(steps.max(initial=0.0)) * grid_step / 2.0


# =============================================================================
# Structured Solver
# =============================================================================


def _roots(
    h_values: np.ndarray, grid: np.ndarray, h: Callable[[float], float], tol: float
) -> list[float]:
    """Roots of h on [0,1]: sign changes refined by brentq, plus near-zero scan points."""
    roots = [float(p) for p, v in zip(grid, h_values, strict=True) if abs(v) <= tol]
    sign_change = np.flatnonzero(np.sign(h_values[:-1]) * np.sign(h_values[1:]) < 0)
    for i in sign_change:
        root = optimize.brentq(h, grid[i], grid[i + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps)
        if abs(h(root)) <= tol:
            roots.append(float(root))
    # Tangential roots: local minima of |h| between scan points.
    magnitude = np.abs(h_values)
    for i in range(1, len(grid) - 1):
        if magnitude[i] < magnitude[i - 1] and magnitude[i] <= magnitude[i + 1] and magnitude[i] > tol:
            found = optimize.minimize_scalar(
                lambda p: abs(h(p)), bounds=(grid[i - 1], grid[i + 1]), method="bounded",
                options={"xatol": 1e-14},
            )
            if abs(h(found.x)) <= tol:
                roots.append(float(found.x))
    return roots


def phi_structured(prog: BernoulliProgram, tol: float | None = None) -> StructuredResult:
    """
    Minimize over vectors with `ones` entries equal to 1 and `mids` entries at a common p.

    Every (ones, mids) with ones + mids <= n is scanned on a 1e-3 grid in p;
    roots of E[g] - phi are refined to |violation| <= tol. Roots at p = 0 or 1
    are folded into the pure {0, 1} structure. Ties prefer fewer ones, then
    fewer mid entries.

    Raises:
        InfeasibleProgramError: No structure meets the constraint
    """
    tol = settings.feasibility_tolerance if tol is None else tol
    f = np.asarray(prog.f)
    g = np.asarray(prog.g)
    grid = np.linspace(0.0, 1.0, int(round(1.0 / settings.scan_step)) + 1)

    best: StructuredResult | None = None
    nearest = (math.inf, 0, 0, 0.0)

    def offer(candidate: StructuredResult) -> None:
        nonlocal best
        key = (candidate.ones, candidate.mids)
        if (
            best is None
            or candidate.value < best.value - TIE_TOLERANCE
            or (abs(candidate.value - best.value) <= TIE_TOLERANCE and key < (best.ones, best.mids))
        ):
            best = candidate

    for ones in range(prog.n + 1):
        violation = abs(g[ones] - prog.phi)
        if violation < nearest[0]:
            nearest = (violation, ones, 0, 0.0)
        if violation <= tol:
            offer(StructuredResult(value=float(f[ones]), ones=ones, mids=0, p=0.0, violation=violation))
        for mids in range(1, prog.n - ones + 1):

            def h(p: float, ones: int = ones, mids: int = mids) -> float:
                return float(_structured_expectation(g, ones, mids, np.array([p]))[0] - prog.phi)

            h_values = _structured_expectation(g, ones, mids, grid) - prog.phi
            i = int(np.argmin(np.abs(h_values)))
            if abs(h_values[i]) < nearest[0]:
                nearest = (float(abs(h_values[i])), ones, mids, float(grid[i]))
            for p in _roots(h_values, grid, h, tol):
                if p <= TIE_TOLERANCE or p >= 1.0 - TIE_TOLERANCE:
                    a, j, p = (ones + mids, 0, 0.0) if p >= 0.5 else (ones, 0, 0.0)
                    value = float(f[a])
                else:
                    a, j = ones, mids
                    value = float(_structured_expectation(f, ones, mids, np.array([p]))[0])
                offer(StructuredResult(value=value, ones=a, mids=j, p=p, violation=abs(h(p))))

    if best is None:
        violation, ones, mids, p = nearest
        raise InfeasibleProgramError(
            f"No structure satisfies E[g] = {prog.phi}; nearest has violation {violation:.3g} "
            f"at ones={ones}, mids={mids}, p={p}"
        )
    return best


# =============================================================================
# Closed-form Specializations
# =============================================================================


def phi_ar_ut(n: int, k: int, phi: float) -> RootResult:
    """
    E[AR_k(Bin(n, p))] at the p solving E[UT_k(Bin(n, p))] = phi.

    Raises:
        ValidationError: Unless n > k >= 1 and 0 < phi < 1
    """
    check_supply(k)
    if n <= k:
        raise ValidationError(f"Need n > k, got n={n}, k={k}")
    if not 0.0 < phi < 1.0:
        raise ValidationError(f"Utilization target {phi!r} is unattainable; range is (0, 1)")
    lo, hi = 0.0, 1.0
    for _ in range(settings.bisection_max_iterations):
        mid = 0.5 * (lo + hi)
        if binomial_ut(n, k, mid) < phi:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15:
            break
    else:
        raise ConvergenceError(f"Utilization root for n={n}, k={k} did not converge")
    p = 0.5 * (lo + hi)
    return RootResult(value=binomial_ar(n, k, p), p_root=p)


def utilization_root(n: int, k: int) -> float:
    """p_{n,k}: the common probability at which expected utilization equals gamma_k."""
    return phi_ar_ut(n, k, gamma(k)).p_root


def phi_ar_demand(n: int, k: int) -> DemandMinimum:
    """min over m in {k..n} of E[AR_k(Bin(m, k/m))]."""
    check_supply(k)
    if n < k:
        raise ValidationError(f"Need n >= k, got n={n}, k={k}")
    m = np.arange(k, n + 1)
    curve = binomial_ar_curve(k, m)
    i = int(np.argmin(curve))
    return DemandMinimum(value=float(curve[i]), argmin_m=int(m[i]))


# =============================================================================
# Two-variable Problem
# =============================================================================


def _two_opt_case(prob: TwoOptProblem) -> str:
    if prob.A2 == 0.0:
        return "1a" if prob.A1 == 0.0 else "1b"
    shifted = (prob.phi - prob.A0) / prob.A2 + (prob.A1 / prob.A2) ** 2
    return "2a" if shifted == 0.0 else "2b"


def two_opt_solve(prob: TwoOptProblem) -> TwoOptSolution:
    """
    Global minimum of B0 + B1(p1+p2) + B2 p1 p2 s.t. A0 + A1(p1+p2) + A2 p1 p2 = phi.

    Off the diagonal, interior feasible points are never strictly better than
    the best boundary or diagonal point, so the candidates are: box corners,
    boundary points with the other coordinate solved from the (affine)
    constraint, diagonal roots of the constraint and, for a vacuous
    constraint, the objective's diagonal stationary point.

    Raises:
        InfeasibleProgramError: Constraint cannot be met on [0,1]^2
    """
    tol = settings.feasibility_tolerance

    def constraint(p1: float, p2: float) -> float:
        return prob.A0 + prob.A1 * (p1 + p2) + prob.A2 * p1 * p2

    def objective(p1: float, p2: float) -> float:
        return prob.B0 + prob.B1 * (p1 + p2) + prob.B2 * p1 * p2

    points: list[tuple[float, float]] = [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)]
    for fixed in (0.0, 1.0):
        slope = prob.A1 + prob.A2 * fixed
        if slope != 0.0:
            other = (prob.phi - prob.A0 - prob.A1 * fixed) / slope
            if -1e-12 <= other <= 1.0 + 1e-12:
                other = min(max(other, 0.0), 1.0)
                points += [(fixed, other), (other, fixed)]
    # Diagonal: A2 s^2 + 2 A1 s + A0 - phi = 0.
    if prob.A2 != 0.0:
        roots = np.roots([prob.A2, 2.0 * prob.A1, prob.A0 - prob.phi])
        points += [(float(r.real), float(r.real)) for r in roots if abs(r.imag) <= 1e-12]
    elif prob.A1 != 0.0:
        s = (prob.phi - prob.A0) / (2.0 * prob.A1)
        points.append((s, s))
    elif prob.B2 != 0.0:
        s = -prob.B1 / prob.B2
        points.append((s, s))

    feasible = [
        (objective(p1, p2), min(p1, p2), max(p1, p2))
        for p1, p2 in points
        if -1e-12 <= p1 <= 1.0 + 1e-12
        and -1e-12 <= p2 <= 1.0 + 1e-12
        and abs(constraint(p1, p2) - prob.phi) <= tol
    ]
    if not feasible:
        values = [constraint(p1, p2) for p1, p2 in points if 0.0 <= p1 <= 1.0 and 0.0 <= p2 <= 1.0]
        raise InfeasibleProgramError(
            f"Constraint target {prob.phi} unattainable; boundary and diagonal values span "
            f"[{min(values)}, {max(values)}]",
            context={"low": min(values), "high": max(values)},
        )
    least = min(value for value, _, _ in feasible)
    value, p1, p2 = min(c for c in feasible if c[0] <= least + TIE_TOLERANCE)
    case = _two_opt_case(prob)
    logger.debug(f"Two-variable problem solved in case {case} at ({p1}, {p2})")
    return TwoOptSolution(
        value=value, p1=min(max(p1, 0.0), 1.0), p2=min(max(p2, 0.0), 1.0), case_tag=case
    )
