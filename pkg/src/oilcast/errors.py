"""Shared exception types.

Callers distinguish recoverable input problems (ValueError subclasses)
from optimizer failures (RuntimeError subclass, carries diagnostics).
"""


class InsufficientDataError(ValueError):
    """Series too short for the requested operation."""


class DegenerateSeriesError(ValueError):
    """Input is constant or otherwise carries no usable variation."""


class AlignmentError(ValueError):
    """Inputs could not be aligned by trading date."""

    def __init__(self, message, offenders=None):
        super().__init__(message)
        self.offenders = list(offenders) if offenders else []


class ParseError(ValueError):
    """Malformed input file; carries the offending line number."""

    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class OptimizationError(RuntimeError):
    """Numerical optimization failed; carries best-so-far diagnostics."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
