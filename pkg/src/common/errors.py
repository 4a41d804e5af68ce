"""
Errors

One hierarchy for every failure the lab can report.
"""


class LoopLabError(Exception):
    """Base class for all lab errors."""


class NumericInputError(LoopLabError, ValueError):
    """Non-finite or malformed numeric input."""


class DimensionMismatchError(LoopLabError, ValueError):
    """Operands of incompatible shape or group dimension."""


class ParameterRangeError(LoopLabError, ValueError):
    """A path parameter or width lies outside its allowed range."""


class KinkError(ParameterRangeError):
    """Velocity requested at a kink of a piecewise-linear loop."""


class SupportError(ParameterRangeError):
    """A bump support touches the endpoints of the loop."""


class ParameterCollisionError(ParameterRangeError):
    """Two bump supports overlap (contact-term region)."""


class UnknownKindError(LoopLabError, ValueError):
    """A named family, chart, constraint, integrand or option does not exist."""


class LoopAgreementError(LoopLabError, ValueError):
    """Loops that should agree on an initial segment do not."""


class ImmersionError(LoopLabError):
    """Derivative of a parametrization is not of full column rank."""


class RankMismatchError(LoopLabError):
    """Numerical rank differs from the declared constant rank."""


class ChartMismatchError(LoopLabError):
    """Two charts do not parametrize the same set."""


class LogBranchError(LoopLabError):
    """A group element left the principal-logarithm domain."""

    def __init__(self, message: str, link: tuple | None = None):
        super().__init__(message)
        self.link = link


class ConstraintViolationError(LoopLabError):
    """Input violates the flatness constraint it must satisfy."""


class ImplicitSolveError(LoopLabError):
    """Root finding for an implicit function did not converge."""


class ConfigError(LoopLabError, ValueError):
    """Invalid run configuration."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key
