"""Exception hierarchy shared by every module."""


class DsGainError(Exception):
    """Base class for all errors raised by dsgain."""


class SchemaError(DsGainError, ValueError):
    """A floorplan or parameter document is missing a field or has a wrong type."""


class GeometryError(DsGainError, ValueError):
    """Rooms overlap, leave the outline, or fail to tile it."""


class ParamError(DsGainError, ValueError):
    """A room type or blockage row is missing from the parameter table."""


class DomainError(DsGainError, ValueError):
    """A kernel was called outside its mathematical domain."""


class ConvergenceError(DsGainError, ArithmeticError):
    """Adaptive quadrature did not reach the requested tolerance."""


class InsufficientSamplesError(DsGainError):
    """Too few Monte-Carlo samples qualify for the requested statistic."""
