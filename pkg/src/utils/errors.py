"""
Exception hierarchy for the unimodal mixture toolkit.

The CLI maps each family to an exit code (see ``src/main.py``).
"""

from typing import Optional


class UnimodalError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class ConfigError(UnimodalError):
    """Invalid or inconsistent run configuration."""

    exit_code = 2


class DataError(UnimodalError):
    """Problems with input data (missing values, non-numeric cells, bad schema)."""

    exit_code = 3

    def __init__(self, message: str, row: Optional[int] = None):
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)
        self.row = row


class NumericalError(UnimodalError):
    """A numerical failure inside a sampler (non-finite likelihood, exhausted rejection caps)."""

    exit_code = 4

    def __init__(self, message: str, observation: Optional[int] = None):
        if observation is not None:
            message = f"observation {observation}: {message}"
        super().__init__(message)
        self.observation = observation


class BoundViolationError(NumericalError):
    """A rejection sampler met a proposal whose acceptance probability exceeds 1."""


class DomainError(UnimodalError, ValueError):
    """Argument outside the mathematical domain of a density or sampler."""

    exit_code = 4
