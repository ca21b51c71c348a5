"""
Custom exceptions for the TISCasimir numerics library.
"""

from typing import Any, Dict, Optional, Sequence


class CasimirError(Exception):
    """Base exception class for all TISCasimir errors."""

    pass


class PoleError(CasimirError):
    """Raised when a function is evaluated at one of its poles."""

    def __init__(self, function: str, point: float, message: Optional[str] = None):
        self.function = function
        self.point = point
        if message is None:
            message = f"{function} has a pole at {point!r}"
        super().__init__(message)


class DomainError(CasimirError):
    """Raised when an argument lies outside the domain of an operation."""

    def __init__(self, field: str, value: Any, message: Optional[str] = None):
        self.field = field
        self.value = value
        if message is None:
            message = f"Invalid value for '{field}': {value!r}"
        super().__init__(message)


class ConvergenceError(CasimirError):
    """Raised when a truncated sum hits its cap before reaching the tolerance."""

    def __init__(
        self,
        quantity: str,
        terms_used: int,
        est_error: float,
        message: Optional[str] = None,
    ):
        self.quantity = quantity
        self.terms_used = terms_used
        self.est_error = est_error
        if message is None:
            message = (
                f"{quantity} did not converge after {terms_used} terms "
                f"(estimated error {est_error:.3g})"
            )
        super().__init__(message)


class ExtrapolationError(CasimirError):
    """Raised when a Richardson ladder does not converge monotonically."""

    def __init__(self, quantity: str, values: Sequence[float], message: Optional[str] = None):
        self.quantity = quantity
        self.values = list(values)
        if message is None:
            message = f"Extrapolation ladder for {quantity} is not monotone: {self.values!r}"
        super().__init__(message)


class RouteDisagreementError(CasimirError):
    """Raised when independent evaluation routes disagree beyond their error estimates."""

    def __init__(
        self,
        totals: Dict[str, float],
        tolerance: float,
        message: Optional[str] = None,
    ):
        self.totals = dict(totals)
        self.tolerance = tolerance
        if message is None:
            listed = ", ".join(f"{name}={value!r}" for name, value in self.totals.items())
            message = f"Routes disagree beyond {tolerance:.3g}: {listed}"
        super().__init__(message)


class ConfigError(CasimirError):
    """Raised when a configuration file cannot be loaded or validated."""

    def __init__(self, source: str, message: Optional[str] = None):
        self.source = source
        if message is None:
            message = f"Error loading configuration '{source}'"
        super().__init__(message)
