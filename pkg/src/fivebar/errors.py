"""Exception hierarchy shared by all fivebar modules."""


class FiveBarError(ValueError):
    """Base class for every domain error raised by this package."""


class InfeasibleConfigurationError(FiveBarError):
    """The coupler circles around the elbows do not intersect.

    ``index`` is set when the failure comes from a batch operation.
    """

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class UnreachableTargetError(FiveBarError):
    """A target point lies outside the reachable workspace of a crank chain."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class SingularSystemError(FiveBarError):
    """A trajectory coefficient system is singular or nearly so."""


class DegenerateStepError(FiveBarError):
    """Two consecutive path points coincide, so no direction is defined."""


class InvalidInputError(FiveBarError):
    """Parameters violate a documented precondition."""


class DataFormatError(FiveBarError):
    """A data or configuration file could not be parsed."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
