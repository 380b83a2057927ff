"""Exception hierarchy shared by all ssdg modules."""


class SSDGError(Exception):
    """Base class for every error raised by this package."""


class DegenerateExponent(SSDGError, ZeroDivisionError):
    """The amplitude substitution is undefined because 1 - sigma - xi == 0."""


class InadmissibleParams(SSDGError, ValueError):
    """Parameters lie outside the region where the requested solution exists."""


class NotSimplFamily(SSDGError, ValueError):
    """Coefficients are not in the one-parameter (nu = sigma = 0, 0 < xi < 1) family."""


class InvalidGrid(SSDGError, ValueError):
    pass


class EmptySupport(SSDGError, ValueError):
    """The field vanishes identically where a nonzero density is required."""


class OutsideSupport(SSDGError, ValueError):
    pass


class DisconnectedSupport(SSDGError, ValueError):
    pass


class TooFewSnapshots(SSDGError, ValueError):
    pass


class UnstableStep(SSDGError, ArithmeticError):
    """A time step amplified max|psi| by more than the blow-up threshold."""

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class ConfigError(SSDGError, ValueError):
    """Malformed scenario configuration; ``field`` names the offending key path."""

    def __init__(self, message, field=None, line=None):
        loc = []
        if field is not None:
            loc.append(f"field '{field}'")
        if line is not None:
            loc.append(f"line {line}")
        super().__init__(f"{message} ({', '.join(loc)})" if loc else message)
        self.field = field
        self.line = line
