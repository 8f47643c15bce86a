"""Exception hierarchy shared by all modules."""


class DyadicError(Exception):
    """Base class for every error raised by this package."""


class NotEisenstein(DyadicError):
    pass


class PrecisionTooSmall(DyadicError):
    """A question cannot be decided at the precision carried by the operands."""


class PrecisionMismatch(DyadicError):
    pass


class PrecisionExhausted(DyadicError):
    """An operation cannot guarantee the requested output precision."""


class NotAUnit(DyadicError):
    pass


class NotInvertible(DyadicError):
    pass


class NotPrimitive(DyadicError):
    """Both coordinates of a projective pair are non-units."""


class ShapeViolation(DyadicError):
    pass


class NotTraceZero(DyadicError):
    pass


class NotASubgroup(DyadicError):
    pass


class Overflow(DyadicError):
    """An enumeration would exceed the configured size cap."""


class HypothesisViolated(DyadicError):
    """Parameters lie outside the range where the theorem is claimed."""


class ConfigError(DyadicError):
    pass


class InternalError(DyadicError):
    """An invariant that the mathematics guarantees was found broken."""
