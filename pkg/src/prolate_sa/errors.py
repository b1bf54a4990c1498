"""Exception hierarchy.

Input problems derive from ``ValidationError`` and numerical failures from
``ConvergenceError``; the CLI maps these to exit codes 2 and 3.
"""


class ProlateError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(ProlateError, ValueError):
    pass


class ConvergenceError(ProlateError, ArithmeticError):
    pass


class NotUnitary(ValidationError):
    pass


class RankDeficient(ValidationError):
    pass


class NotSelfOrthogonal(ValidationError):
    pass


class ProjectionSingular(ValidationError):
    pass


class TruncationTooShort(ValidationError):
    pass


class OutOfRadius(ValidationError):
    pass


class NotSymmetric(ValidationError):
    pass


class GridMismatch(ValidationError):
    pass


class IsIdentity(ValidationError):
    pass


class NotAnEigenvalue(ValidationError):
    pass


class NoConvergence(ConvergenceError):
    pass


class NotConverged(ConvergenceError):
    pass


class MarchFailure(ConvergenceError):
    pass


class MatchSingular(ConvergenceError):
    pass


class ScanTooCoarse(ConvergenceError):
    pass


class DegenerateEigenvalue(ConvergenceError):
    pass
