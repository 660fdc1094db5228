"""
Custom Exceptions for Prophet Thresholds.

Provides specific error types for different failure scenarios.
"""

from typing import Any


class ProphetThresholdsError(Exception):
    """Base exception for all prophet-thresholds errors."""

    def __init__(self, message: str, context: dict[str, Any] | None = None):
        self.message = message
        self.context = context or {}
        super().__init__(self.message)


class ValidationError(ProphetThresholdsError):
    """Raised when an input violates an operation's precondition."""

    pass


class InvalidSupplyError(ValidationError):
    """Raised when the supply k is not a positive integer."""

    def __init__(self, k: int):
        super().__init__(
            message=f"Supply must be a positive integer, got k={k}",
            context={"k": k},
        )


class InstanceValidationError(ValidationError):
    """Raised when an instance file parses but violates a model invariant."""

    pass


class NonIidInstanceError(ValidationError):
    """Raised when an operation that needs IID values receives differing distributions."""

    pass


class InstanceParseError(ProphetThresholdsError):
    """Raised when an instance file is malformed."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message=message, context={"field": field})
        self.field = field


class CalibrationError(ProphetThresholdsError):
    """Raised when a threshold policy cannot be calibrated."""

    pass


class UnattainableTargetError(CalibrationError):
    """Raised when a calibration target lies outside the attainable range."""

    def __init__(self, statistic: str, target: float, low: float, high: float):
        super().__init__(
            message=(
                f"Target {target!r} for {statistic} is unattainable; "
                f"attainable range is [{low!r}, {high!r}]"
            ),
            context={"statistic": statistic, "target": target, "low": low, "high": high},
        )
        self.low = low
        self.high = high


class UnsupportedStatisticError(CalibrationError):
    """Raised for statistics that cannot be used as a calibration target."""

    pass


class ConvergenceError(CalibrationError):
    """Raised when a bisection fails to converge within its iteration cap."""

    pass


class EnumerationCapError(ProphetThresholdsError):
    """Raised when exact enumeration would exceed the joint-outcome cap."""

    def __init__(self, outcomes: int, cap: int):
        super().__init__(
            message=(
                f"Exact prophet enumeration needs {outcomes} joint outcomes "
                f"(cap {cap}); use mode 'monte_carlo' or 'layered' instead"
            ),
            context={"outcomes": outcomes, "cap": cap},
        )


class ProgramTooLargeError(ProphetThresholdsError):
    """Raised when a brute-force search exceeds its size limits."""

    pass


class InfeasibleProgramError(ProphetThresholdsError):
    """Raised when no point satisfies a Bernoulli program's constraint."""

    pass
