"""Exception hierarchy shared across the package."""


class FinslerError(Exception):
    """Base class for all finslerlab errors."""


class DomainError(FinslerError):
    """A point lies outside the metric's domain of definition."""


class DegenerateDirectionError(FinslerError):
    """y = 0 (or numerically indistinguishable from it) was supplied."""


class NumericError(FinslerError):
    """Numerical failure: singular systems, underflow, divergent extrapolation."""


class SingularMetricError(NumericError):
    """Fundamental tensor is singular or catastrophically ill-conditioned."""


class DegenerateFlagError(FinslerError):
    """Flag direction is numerically parallel to the pole direction y."""


class NotProjectivelyRelatedError(FinslerError):
    """Spray defect exceeded tolerance for a pair assumed projectively related."""


class FDOracleError(NumericError):
    """Richardson extrapolation failed to converge (non-smooth point or bad scaling)."""


class JetError(FinslerError):
    """Invalid jet-ring operation: zero-base division, negative-base sqrt/log, context mismatch."""
