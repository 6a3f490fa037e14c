"""Exception hierarchy shared by every module of the package."""


class QuasiHermError(Exception):
    """Base class for all errors raised by quasiherm."""


class DimensionError(QuasiHermError, ValueError):
    pass


class ScheduleError(QuasiHermError, ValueError):
    pass


class ParameterError(QuasiHermError, ValueError):
    pass


class InsufficientDataError(QuasiHermError, ValueError):
    pass


class NumericError(QuasiHermError, ArithmeticError):
    """Numerical breakdown (non-convergence, NaN, overflow).

    ``last_good_time`` is set by integrators to the last grid time at which
    the state was still finite.
    """

    def __init__(self, message, last_good_time=None):
        super().__init__(message)
        self.last_good_time = last_good_time


class NoPositiveMetricError(QuasiHermError):
    """The operator has non-real spectrum, so no positive metric exists."""


class StructureError(QuasiHermError):
    """The Hermitization problem is degenerate (typically an EP input)."""


class FactorizationError(QuasiHermError):
    """The metric is not positive definite and cannot be square-rooted."""


class NearSingularError(QuasiHermError):
    pass


class DegeneracyError(QuasiHermError):
    pass


class SelfOrthogonalityError(DegeneracyError):
    """Left and right eigenvectors are (numerically) orthogonal."""


class ConsistencyError(QuasiHermError):
    """Two modules disagree beyond tolerance."""


class ConfigError(QuasiHermError, ValueError):
    """Invalid scenario configuration; ``key`` names the offending entry."""

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key
