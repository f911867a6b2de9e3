"""Package exceptions."""

from __future__ import annotations

__all__ = ["StablePowError", "AccuracyError", "CriterionError"]


class StablePowError(Exception):
    """Base class for package-specific failures."""


class AccuracyError(StablePowError):
    """A numerical routine could not meet its error contract.

    Carries the best value obtained and the (failed) error estimate.
    """

    def __init__(self, message: str, value: float = float("nan"), estimate: float = float("inf")):
        super().__init__(message)
        self.value = value
        self.estimate = estimate


class CriterionError(StablePowError):
    """A root/threshold search found data inconsistent with its assumptions.

    ``data`` holds the bracketing evidence (list of (point, value) pairs).
    """

    def __init__(self, message: str, data=None):
        super().__init__(message)
        self.data = data or []
