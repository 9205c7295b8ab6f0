"""Exception types shared across the package."""

__all__ = ["ValidationError", "NumericalError"]


class ValidationError(ValueError):
    """Invalid configuration or arguments, detected before any computation."""


class NumericalError(RuntimeError):
    """A computation produced non-finite or otherwise unusable numbers."""
