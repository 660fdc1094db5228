"""
Prophet Thresholds Settings.

Environment-based configuration using pydantic-settings.
"""

from pathlib import Path

from pydantic_settings import BaseSettings


class ProphetSettings(BaseSettings):
    """Configuration settings for calibration, evaluation and verification."""

    # Logging
    log_level: str = "INFO"

    # Parallelism (None = all cores)
    threads: int | None = None

    # ==========================================================================
    # Numerical Tolerances
    # ==========================================================================
    calibration_tolerance: float = 1e-10
    bisection_max_iterations: int = 200
    poisson_tail: float = 1e-16
    feasibility_tolerance: float = 1e-9
    scan_step: float = 1e-3

    # ==========================================================================
    # Benchmarks & Simulation
    # ==========================================================================
    enumeration_cap: int = 10_000_000
    mc_block_size: int = 4096
    default_trials: int = 100_000
    default_seed: int = 0

    # ==========================================================================
    # Bernoulli Programs & Curves
    # ==========================================================================
    brute_force_cap: int = 2_000_000
    large_n: int = 10_000

    model_config = {
        "env_prefix": "PROPHET_",
        "env_file": str(Path(__file__).resolve().parent.parent / ".env"),
        "extra": "ignore",
    }


# Global settings instance
settings = ProphetSettings()
