"""Exception hierarchy shared by every module."""


class HorizonRiskError(Exception):
    """Base class for all package errors."""


class ParameterError(HorizonRiskError, ValueError):
    """A model or configuration parameter is outside its domain."""


class StationarityError(ParameterError):
    """GARCH coefficients violate second-order stationarity."""


class RangeError(HorizonRiskError, IndexError):
    """A lag, horizon or index is outside the supported range."""


class InsufficientDataError(HorizonRiskError, ValueError):
    """The series is too short for the requested window, horizon or pool size."""


class DegeneracyError(HorizonRiskError, ArithmeticError):
    """The autocovariance table is not (numerically) positive definite."""


class DataError(HorizonRiskError, ValueError):
    """Input data could not be read or contains invalid values."""
