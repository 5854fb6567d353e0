"""
Custom exceptions for gaplab.
"""


class GapLabError(Exception):
    """Base exception for all gaplab errors."""

    def __init__(self, message: str, location: float | None = None) -> None:
        super().__init__(message)
        self.location = location


class IntegrationError(GapLabError):
    """Raised when an initial-value integration fails (stiffness, NaN)."""

    pass


class EigensolverError(GapLabError):
    """Raised when the tridiagonal eigensolver fails or its residual is too large."""

    pass


class BracketError(GapLabError):
    """Raised when a root bracket shows no sign change."""

    pass


class DomainError(GapLabError):
    """Raised when a problem violates its preconditions (e.g. D >= pi)."""

    pass


class SearchCapError(GapLabError):
    """Raised when a parameter search exceeds its configured cap."""

    pass


class BoundViolationError(GapLabError):
    """Raised when a solution leaves a bound that theory says it cannot leave."""

    pass


class ConfigValidationError(GapLabError):
    """Raised when a run configuration does not match the expected schema."""

    pass
