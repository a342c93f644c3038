"""Exception types raised across the package.

The split mirrors how callers should react: a ParseError means the document
text itself is malformed, a ValidationError means the document was readable
but carries impossible values, a PreconditionError means the caller violated
an API contract, and the remaining two cover degenerate statistics input and
diverging optimization.
"""

from __future__ import annotations


class TurnkitError(Exception):
    """Base class for every error raised by this package."""


class ParseError(TurnkitError, ValueError):
    """A document could not be decoded; the message names the line or record."""


class ValidationError(TurnkitError, ValueError):
    """A decoded value violates a domain invariant (e.g. start after end)."""


class PreconditionError(TurnkitError, ValueError):
    """A function was called in a way that breaks its documented contract."""


class DegenerateInputError(TurnkitError, ValueError):
    """A statistic was requested over input with no mass (e.g. empty reference)."""


class TrainingError(TurnkitError, RuntimeError):
    """Optimization produced a non-finite loss.  Carries the failing step."""

    def __init__(self, message: str, step: int | None = None) -> None:
        super().__init__(message)
        self.step = step
