"""
Monte Carlo Policy Simulation.

Trials are split into fixed-size blocks; block b draws from
default_rng([seed, b]), so estimates depend only on (seed, trials, block size)
and never on the number of worker threads.
"""

import logging
import math
import os
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from prophet_thresholds.config.settings import settings
from prophet_thresholds.domain.exceptions import ValidationError
from prophet_thresholds.domain.models import Instance, SimulationEstimate, ThresholdPolicy

logger = logging.getLogger("prophet_thresholds.simulation")

BlockSampler = Callable[[np.random.Generator, int], np.ndarray]


def resolve_threads(threads: int | None = None) -> int:
    """Worker count: explicit value, else PROPHET_THREADS, else all cores."""
    if threads is None:
        threads = settings.threads
    if threads is None:
        threads = os.cpu_count() or 1
    return max(1, int(threads))


def run_blocks(
    sampler: BlockSampler,
    trials: int,
    seed: int,
    block_size: int | None = None,
    threads: int | None = None,
) -> np.ndarray:
    """
    Evaluate `sampler` over counter-derived substreams and concatenate in block order.

    Args:
        sampler: Maps (generator, block length) to one outcome per trial
        trials: Total number of trials
        seed: Master seed
        block_size: Trials per substream; defaults to settings.mc_block_size
        threads: Worker threads; defaults to resolve_threads()

    Returns:
        Array of per-trial outcomes, identical for any thread count
    """
    if trials < 1:
        raise ValidationError(f"Need at least one trial, got {trials}")
    block_size = block_size or settings.mc_block_size
    sizes = [min(block_size, trials - start) for start in range(0, trials, block_size)]

    def run(block: int) -> np.ndarray:
        return sampler(np.random.default_rng([seed, block]), sizes[block])

    workers = min(resolve_threads(threads), len(sizes))
    if workers == 1:
        outcomes = [run(b) for b in range(len(sizes))]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(run, range(len(sizes))))
    return np.concatenate(outcomes)


def summarize(outcomes: np.ndarray) -> SimulationEstimate:
    """Sample mean and its standard error."""
    trials = len(outcomes)
    std_error = float(np.std(outcomes, ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return SimulationEstimate(estimate=float(np.mean(outcomes)), std_error=std_error, trials=trials)


def sample_values(inst: Instance, rng: np.random.Generator, size: int) -> np.ndarray:
    """Draw a (size, n) matrix of independent values by inverse-cdf lookup."""
    values = np.empty((size, inst.n))
    tables: dict[int, tuple[np.ndarray, np.ndarray]] = {}
    for i, dist in enumerate(inst.dists):
        key = id(dist)
        if key not in tables:
            tables[key] = (dist.values, np.cumsum(dist.masses))
        atoms, cdf = tables[key]
        index = np.searchsorted(cdf, rng.random(size), side="right")
        values[:, i] = atoms[np.minimum(index, len(atoms) - 1)]
    return values


class PolicySimulator:
    """Simulates a static threshold policy under uniformly random arrival order."""

    def __init__(self, block_size: int | None = None, threads: int | None = None):
        self.block_size = block_size or settings.mc_block_size
        self.threads = threads

    def sample_block(
        self,
        inst: Instance,
        pol: ThresholdPolicy,
        rng: np.random.Generator,
        size: int,
    ) -> np.ndarray:
        """Total accepted value in each of `size` trials."""
        values = sample_values(inst, rng, size)
        coins = rng.random((size, inst.n)) < pol.p
        eligible = (values > pol.t) | ((values == pol.t) & coins)
        arrival = rng.random((size, inst.n))
        arrival[~eligible] = np.inf
        first = np.argsort(arrival, axis=1)[:, : inst.k]
        accepted = np.isfinite(np.take_along_axis(arrival, first, axis=1))
        return np.sum(np.take_along_axis(values, first, axis=1) * accepted, axis=1)

    def run(self, inst: Instance, pol: ThresholdPolicy, trials: int, seed: int) -> SimulationEstimate:
        """Estimate the policy's expected accepted value."""
        outcomes = run_blocks(
            lambda rng, size: self.sample_block(inst, pol, rng, size),
            trials,
            seed,
            self.block_size,
            self.threads,
        )
        estimate = summarize(outcomes)
        logger.debug(
            f"Simulated t={pol.t}, p={pol.p} over {trials} trials: "
            f"{estimate.estimate} +/- {estimate.std_error}"
        )
        return estimate


def simulate_performance(
    inst: Instance,
    pol: ThresholdPolicy,
    trials: int,
    seed: int,
    threads: int | None = None,
) -> SimulationEstimate:
    """Monte Carlo estimate of ST_k for the policy."""
    return PolicySimulator(threads=threads).run(inst, pol, trials, seed)
