"""
Domain Interfaces for Prophet Thresholds.

Abstract Base Classes defining the contract every prophet benchmark must implement.
"""

from abc import ABC, abstractmethod

from .models import Instance, ProphetEstimate


class IProphetEstimator(ABC):
    """Interface for computing the prophet's value PHT_k."""

    @abstractmethod
    def estimate(self, inst: Instance) -> ProphetEstimate:
        """
        Compute the expected sum of the k largest realized values.

        Args:
            inst: Problem instance

        Returns:
            ProphetEstimate with a standard error when the value is sampled
        """
        pass
