"""Exception and warning types raised across the package."""

from __future__ import annotations


class DirichletGeometryError(Exception):
    """Base class for all package errors."""


class ValidationError(DirichletGeometryError, ValueError):
    """Malformed input (series definitions, windows, configs)."""


class NumericFailure(DirichletGeometryError, ArithmeticError):
    """A numerical procedure could not deliver its contract."""


# series_core
class AllZero(ValidationError):
    pass


class AllZeroTail(ValidationError):
    pass


class BadBaseAbscissa(ValidationError):
    pass


class TruncationTooSmall(ValidationError):
    pass


# function_models
class PoleAt1(NumericFailure):
    pass


class AccuracyWindowExceeded(NumericFailure):
    pass


class OverflowGuard(NumericFailure):
    pass


class NotNormalized(ValidationError):
    pass


# lifting
class SeedMismatch(NumericFailure):
    pass


class NotABranchPoint(NumericFailure):
    pass


class HigherOrderBranch(NumericFailure):
    pass


# zeros
class BoundaryTooClose(NumericFailure):
    def __init__(self, msg: str, piece: int | None = None, point: complex | None = None):
        super().__init__(msg)
        self.piece = piece  # index of the contour piece that came too close
        self.point = point


class QuadratureInconclusive(NumericFailure):
    pass


class NonConvergence(NumericFailure):
    pass


class MultiplicityAnomaly(UserWarning):
    """A zero failed the simplicity test. Reported, never raised."""


# atlas
class WindowTooSmall(ValidationError):
    pass


class PoleOnSegment(NumericFailure):
    pass


class RadiusTooLarge(NumericFailure):
    pass


# bohr
class DimensionMismatch(ValidationError):
    pass


# atlas
class DescentFailure(NumericFailure):
    pass


class SlitEscape(NumericFailure):
    pass
