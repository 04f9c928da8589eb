"""Exception types shared across the toolkit."""

from typing import Optional


class DomainError(ValueError):
    """An input lies outside the domain of an operation."""


class ResourceLimitError(MemoryError):
    """A request exceeds a configured memory or capacity limit."""


class PrecisionError(ArithmeticError):
    """The requested precision cannot be reached."""


class InvariantError(AssertionError):
    """A mathematical cross-check failed."""


class CoverageError(RuntimeError):
    """A store does not cover the requested range, kind or class."""

    def __init__(self, message: str, covered: Optional[int] = None):
        super().__init__(message)
        self.covered = covered


class StoreCorruptionError(RuntimeError):
    """A committed chunk of a scan store failed verification."""

    def __init__(self, message: str, last_valid_chunk: Optional[int] = None):
        super().__init__(message)
        self.last_valid_chunk = last_valid_chunk
