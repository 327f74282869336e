"""Exceptions shared across the package."""


class PrecisionError(ArithmeticError):
    """Raised when a computation cannot deliver the requested p-adic precision."""


class BoundError(ArithmeticError):
    """Raised when a series tail bound fails to reach the target precision
    within the configured number of terms (a miscalibrated bound)."""


class UsageError(ValueError):
    """Invalid parameters supplied to a public entry point (CLI exit code 2)."""
