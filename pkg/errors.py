"""
Exception hierarchy for the Farey third-gap toolkit.

Every error raised on purpose by the library derives from ``FareyError`` and
from the builtin that best describes it, so callers may catch either.
"""

from typing import Any, Optional


class FareyError(Exception):
    """Base class for all library errors."""

    pass


class InvalidParameterError(FareyError, ValueError):
    """Raised when an argument violates its documented domain."""

    pass


class NotConsecutiveError(FareyError, ValueError):
    """Raised when two fractions are expected to be Farey neighbors but are not."""

    pass


class EndOfSequenceError(FareyError, LookupError):
    """Raised when asking for the successor of 1/1 or the predecessor of 0/1."""

    pass


class SequenceTooShortError(FareyError, ValueError):
    """Raised when a sequence has fewer than h + 2 members."""

    pass


class PointOutsideTriangleError(FareyError, ValueError):
    """Raised when a point does not belong to the Farey triangle."""

    pass


class CellBoundaryError(FareyError, ValueError):
    """Raised when an operation needs a cell-interior point and gets a boundary one."""

    pass


class EmptyCellError(FareyError, LookupError):
    """Raised when a cell with no points is used where a nonempty one is required."""

    pass


class CurveDomainError(FareyError, ValueError):
    """Raised when a boundary curve is evaluated outside its parameter domain."""

    pass


class UnknownCurveError(FareyError, LookupError):
    """Raised for a curve row selector that matches nothing in the catalog."""

    pass


class MeasureConvergenceError(FareyError, RuntimeError):
    """
    Raised when adaptive subdivision reaches its depth cap before the
    undecided area falls below the tolerance.

    The partial result (value and the error bound reached so far) is kept on
    the exception.
    """

    def __init__(self, message: str, partial: Optional[Any] = None) -> None:
        super().__init__(message)
        self.partial = partial
