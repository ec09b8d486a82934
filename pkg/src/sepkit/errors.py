"""Exception hierarchy shared by all solver modules."""


class SepkitError(Exception):
    """Base class for all package errors."""


class ParseError(SepkitError):
    """Malformed dataset or stream input."""


class ValidationError(SepkitError):
    """Input violates a precondition (general position, vertical line, ...)."""


class DuplicateCoordinate(ValidationError):
    pass


class VerticalLineError(ValidationError):
    pass


class CollinearPointsError(ValidationError):
    pass


class UnknownId(SepkitError):
    pass


class EmptyInput(SepkitError):
    pass


class EmptyColor(EmptyInput):
    pass


class ScheduleViolation(SepkitError):
    """A semi-online deletion arrived earlier than promised."""


class NonPositiveEps(SepkitError):
    pass


class InfeasibleWedge(SepkitError):
    """No valid separator exists within a slope wedge."""


class CapExceeded(SepkitError):
    """Oracle input exceeds its configured size cap."""


class VerticalSeparator(SepkitError):
    """The geometrically required separator is vertical and unrepresentable."""
