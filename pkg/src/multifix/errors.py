"""Exception types shared across the library."""

from __future__ import annotations


class MultifixError(Exception):
    """Base class for library-specific failures."""


class CarrierError(MultifixError, ValueError):
    """A point lies outside a space's carrier."""


class ResourceLimitError(MultifixError):
    """An enumeration guard (carrier size or pair budget) was exceeded."""


class DegenerateSampleError(MultifixError):
    """Every sampled pair had zero separation, so no ratio could be formed."""


class NumericError(MultifixError):
    """Operator evaluation produced a non-finite value."""

    def __init__(self, message: str, iteration: int | None = None, point=None):
        super().__init__(message)
        self.iteration = iteration
        self.point = point


class ProblemFormatError(MultifixError, ValueError):
    """A problem or instance file failed validation; the message names the key path."""
