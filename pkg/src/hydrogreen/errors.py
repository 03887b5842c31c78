"""Exception and warning types raised across the package."""


class HydroGreenError(Exception):
    """Base class for all errors raised by hydrogreen."""


class InvalidClassIndex(HydroGreenError, ValueError):
    pass


class NonPositiveRadius(HydroGreenError, ValueError):
    pass


class DegenerateCurve(HydroGreenError, ValueError):
    pass


class OutOfDomain(HydroGreenError, ValueError):
    pass


class StepTooLarge(HydroGreenError, RuntimeError):
    pass


class BaseAtSingularPoint(HydroGreenError, ValueError):
    pass


class NonPositiveProfile(HydroGreenError, ValueError):
    pass


class ZeroArgument(HydroGreenError, ValueError):
    pass


class AtZeroOfPrime(HydroGreenError, ValueError):
    pass


class CoincidentPoints(HydroGreenError, ValueError):
    pass


class DivergentArea(HydroGreenError, ArithmeticError):
    def __init__(self, message, partial_sums=()):
        super().__init__(message)
        self.partial_sums = tuple(partial_sums)


class DivergentConvolution(HydroGreenError, ArithmeticError):
    def __init__(self, message, partial_sums=()):
        super().__init__(message)
        self.partial_sums = tuple(partial_sums)


class OutOfWindow(HydroGreenError, ValueError):
    """A query fell outside the finite evaluation window of a chart."""


class NonHolomorphic(HydroGreenError, ValueError):
    pass


class SpecParseError(HydroGreenError, ValueError):
    def __init__(self, message, line=None, path=None):
        loc = ""
        if path is not None:
            loc += f"{path}:"
        if line is not None:
            loc += f"{line}:"
        super().__init__(f"{loc} {message}" if loc else message)
        self.line = line
        self.path = path


class AccuracyDegraded(UserWarning):
    """Prime-function truncation was capped below the requested accuracy."""
