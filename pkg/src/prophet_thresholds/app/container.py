"""
Dependency Injection Container.

Holds the objects CLI commands share within one process.
"""

from prophet_thresholds.services.simulation import PolicySimulator, resolve_threads


class Container:
    """Dependency injection container."""

    _simulator: PolicySimulator | None = None
    _threads: int | None = None

    @classmethod
    def get_threads(cls) -> int:
        """Get or resolve the worker count (PROPHET_THREADS, else all cores)."""
        if cls._threads is None:
            cls._threads = resolve_threads()
        return cls._threads

    @classmethod
    def get_simulator(cls) -> PolicySimulator:
        """Get or create the policy simulator."""
        if cls._simulator is None:
            cls._simulator = PolicySimulator(threads=cls.get_threads())
        return cls._simulator

    @classmethod
    def reset(cls) -> None:
        """Reset all singletons (useful for testing)."""
        cls._simulator = None
        cls._threads = None
