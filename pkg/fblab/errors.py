"""
Exception hierarchy for fblab.
"""

from typing import Any, Optional


class FblabError(Exception):
    """Base class for all errors raised by fblab."""


class PreconditionError(FblabError, ValueError):
    """An operation was called with arguments violating its preconditions."""


class EmptyRegionError(PreconditionError):
    """A region with no cells was passed where a nonempty one is required."""


class ShapeSpecError(PreconditionError):
    """A shape specification is malformed, degenerate or leaves the box."""


class ConfigError(FblabError, ValueError):
    """Invalid configuration value or unknown configuration key."""

    def __init__(self, message: str, key: Optional[str] = None):
        super().__init__(message)
        self.key = key


class ConvergenceError(FblabError, RuntimeError):
    """An iterative solver stopped before meeting its tolerance.

    The last iterate and the residual at exit are kept so callers can
    inspect or dump them.
    """

    def __init__(self, message: str, last_iterate: Any = None, residual: float = float("nan")):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.residual = residual


class DetachedDomainError(FblabError):
    """A shape update would leave the fixed body K uncovered."""
