"""
Prophet Benchmark.

Expected sum of the k largest values, by enumeration, by a layered exact
formula or by Monte Carlo.
"""

import logging
import math
from collections import Counter

import numpy as np

from prophet_thresholds.config.settings import settings
from prophet_thresholds.domain.exceptions import EnumerationCapError, ValidationError
from prophet_thresholds.domain.interfaces import IProphetEstimator
from prophet_thresholds.domain.models import Instance, ProphetEstimate, ProphetMode
from prophet_thresholds.services.instances import atom_values
from prophet_thresholds.services.probcore import poisson_binomial
from prophet_thresholds.services.simulation import run_blocks, summarize

logger = logging.getLogger("prophet_thresholds.prophet")

ENUMERATION_CHUNK = 1 << 16


def joint_outcomes(inst: Instance) -> int:
    """Size of the product space of atoms."""
    return math.prod(len(dist.atoms) for dist in inst.dists)


def top_k_sums(values: np.ndarray, k: int) -> np.ndarray:
    """Row-wise sum of the k largest entries."""
    if k >= values.shape[1]:
        return values.sum(axis=1)
    return -np.partition(-values, k - 1, axis=1)[:, :k].sum(axis=1)


class EnumerationProphet(IProphetEstimator):
    """Exact value by enumerating every joint outcome, in fixed-size chunks."""

    def __init__(self, cap: int | None = None):
        self.cap = cap or settings.enumeration_cap

    def estimate(self, inst: Instance) -> ProphetEstimate:
        total = joint_outcomes(inst)
        if total > self.cap:
            raise EnumerationCapError(total, self.cap)
        sizes = np.array([len(dist.atoms) for dist in inst.dists], dtype=np.int64)
        strides = np.ones(inst.n, dtype=np.int64)
        for i in range(inst.n - 2, -1, -1):
            strides[i] = strides[i + 1] * sizes[i + 1]
        atoms = [dist.values for dist in inst.dists]
        masses = [dist.masses for dist in inst.dists]

        partials = []
        for start in range(0, total, ENUMERATION_CHUNK):
            index = np.arange(start, min(total, start + ENUMERATION_CHUNK), dtype=np.int64)
            values = np.empty((len(index), inst.n))
            weight = np.ones(len(index))
            for i in range(inst.n):
                digit = (index // strides[i]) % sizes[i]
                values[:, i] = atoms[i][digit]
                weight *= masses[i][digit]
            partials.append(float(weight @ top_k_sums(values, inst.k)))
        logger.debug(f"Enumerated {total} joint outcomes")
        return ProphetEstimate(value=math.fsum(partials), mode=ProphetMode.EXACT)


class LayeredProphet(IProphetEstimator):
    """
    Exact value through the layer-cake identity.

    The top-k sum equals the integral over x of min(k, #{i : V_i > x}); on
    [u_{j-1}, u_j) the count is a Poisson-Binomial over P(V_i >= u_j).
    """

    def estimate(self, inst: Instance) -> ProphetEstimate:
        levels = atom_values(inst)
        total = []
        previous = 0.0
        for level in levels:
            if level <= 0.0:
                continue
            at_least = [
                math.fsum(a.mass for a in dist.atoms if a.value >= level) for dist in inst.dists
            ]
            law = poisson_binomial(np.minimum(at_least, 1.0))
            served = np.minimum(np.arange(law.n + 1), inst.k)
            total.append((level - previous) * float(law.pmf @ served))
            previous = float(level)
        return ProphetEstimate(value=math.fsum(total), mode=ProphetMode.LAYERED)


class MonteCarloProphet(IProphetEstimator):
    """
    Sampled value.

    Identical applicants are sampled jointly as multinomial atom counts,
    which has the same law as sampling each of them.
    """

    def __init__(
        self,
        trials: int,
        seed: int,
        block_size: int | None = None,
        threads: int | None = None,
    ):
        self.trials = trials
        self.seed = seed
        self.block_size = block_size
        self.threads = threads

    def estimate(self, inst: Instance) -> ProphetEstimate:
        groups = Counter(inst.dists)
        values = np.concatenate([dist.values for dist in groups])
        order = np.argsort(-values, kind="stable")
        ranked = values[order]

        def sample(rng: np.random.Generator, size: int) -> np.ndarray:
            counts = np.concatenate(
                [rng.multinomial(c, dist.masses, size=size) for dist, c in groups.items()],
                axis=1,
            )[:, order]
            before = np.cumsum(counts, axis=1) - counts
            taken = np.clip(inst.k - before, 0, counts)
            return taken @ ranked

        summary = summarize(run_blocks(sample, self.trials, self.seed, self.block_size, self.threads))
        return ProphetEstimate(
            value=summary.estimate, std_error=summary.std_error, mode=ProphetMode.MONTE_CARLO
        )


def prophet_value(
    inst: Instance,
    mode: ProphetMode = ProphetMode.EXACT,
    trials: int | None = None,
    seed: int | None = None,
) -> ProphetEstimate:
    """
    Prophet benchmark PHT_k in the requested mode.

    Args:
        inst: Problem instance
        mode: exact (capped enumeration), layered (exact, polynomial) or monte_carlo
        trials: Monte Carlo trials; defaults to settings.default_trials
        seed: Monte Carlo seed; defaults to settings.default_seed

    Returns:
        ProphetEstimate (std_error set only for monte_carlo)
    """
    estimator: IProphetEstimator
    match ProphetMode(mode):
        case ProphetMode.EXACT:
            estimator = EnumerationProphet()
        case ProphetMode.LAYERED:
            estimator = LayeredProphet()
        case ProphetMode.MONTE_CARLO:
            estimator = MonteCarloProphet(
                trials=settings.default_trials if trials is None else trials,
                seed=settings.default_seed if seed is None else seed,
            )
        case _:
            raise ValidationError(f"Unknown prophet mode {mode!r}")
    return estimator.estimate(inst)
