"""Exception hierarchy shared by every module of the package."""


class SkewCarlesonError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(SkewCarlesonError, ValueError):
    """A point lies on or outside the boundary of the model domain."""


class ParameterError(SkewCarlesonError, ValueError):
    """An exponent or parameter is outside its admissible range."""


class BranchError(ParameterError):
    """The requested diagnostic is not defined on this parameter branch."""


class EvaluationError(SkewCarlesonError, ArithmeticError):
    """An integrand produced a non-finite value at a quadrature node."""


class DivergenceError(SkewCarlesonError, ArithmeticError):
    """An integral that should be finite diverged for the given exponents."""


class ResourceError(SkewCarlesonError, MemoryError):
    """A requested construction would exceed the configured memory budget."""


class ConfigError(SkewCarlesonError, ValueError):
    """An experiment configuration failed validation.

    Parameters
    ----------
    path : str
        Dotted path of the offending field, e.g. ``"measure.exponent"``.
    message : str
        Human-readable reason.
    """

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")


class BoundaryGrowthWarning(RuntimeWarning):
    """A transform is evaluated in a regime where it blows up at the boundary."""


class HypothesisWarning(UserWarning):
    """The exponent hypothesis of the operator theorem fails for these parameters."""
