"""Exception types raised across graphprec."""

from __future__ import annotations


class GraphPrecError(Exception):
    """Base class for all errors raised by this package."""


class ShapeError(GraphPrecError, ValueError):
    pass


class DimensionMismatch(ShapeError):
    pass


class NotSquare(ShapeError):
    pass


class EmptyMatrix(ShapeError):
    pass


class NonFiniteEntries(GraphPrecError, ValueError):
    pass


class NotSymmetric(GraphPrecError, ValueError):
    pass


class NotBinary(GraphPrecError, ValueError):
    pass


class NotPositiveDefinite(GraphPrecError, ValueError):
    pass


class IndexOutOfRange(GraphPrecError, IndexError):
    pass


class SubmatrixNotPD(NotPositiveDefinite):
    """The support submatrix of the covariance for some column is singular.

    Usually this means the support size is at least the sample size.
    """

    def __init__(self, column: int, message: str | None = None):
        self.column = column
        super().__init__(
            message
            or f"covariance submatrix for column {column} is not positive definite"
        )


class TooFewRows(GraphPrecError, ValueError):
    pass


class InvalidLevel(GraphPrecError, ValueError):
    pass


class NonPositive(GraphPrecError, ValueError):
    pass


class ZeroVarianceColumn(GraphPrecError, ValueError):
    def __init__(self, column: int):
        self.column = column
        super().__init__(f"column {column} has zero sample variance")


class DegenerateResidual(GraphPrecError, ArithmeticError):
    pass


class InvalidSize(GraphPrecError, ValueError):
    pass


class AllFoldsDegenerate(GraphPrecError, ArithmeticError):
    pass


class ZeroTrueComponent(GraphPrecError, ValueError):
    pass


class LengthMismatch(ShapeError):
    pass


class InvalidConfig(GraphPrecError, ValueError):
    pass


class ConvergenceWarning(UserWarning):
    """Emitted when an iterative solver stops at its iteration cap."""
