"""Exception hierarchy for the magnoncat package."""


class MagnoncatError(Exception):
    """Base class for all package errors."""


class DimensionError(MagnoncatError):
    """Matrix or state has the wrong shape / number of modes."""


class DomainError(MagnoncatError):
    """Operation applied in the wrong phase-space domain."""


class PhysicalityError(MagnoncatError):
    """Covariance matrix violates the uncertainty principle."""


class IntegrabilityError(MagnoncatError):
    """Gaussian exponent does not decay along the integration directions."""


class DegenerateHeraldError(MagnoncatError):
    """Photon subtraction attempted on a state with no photons."""


class ZeroProbabilityOutcomeError(MagnoncatError):
    """Homodyne projection onto an outcome of vanishing density."""


class UnstableRegimeError(MagnoncatError):
    """Effective pump rate G = g^2/kappa - gamma is not positive."""


class NumericalIntegrationError(MagnoncatError):
    """Moment-ODE integration failed (instability or non-finite values)."""


class StabilityError(MagnoncatError):
    """Finite-difference evolution exceeded its growth bound."""


class HorizonError(MagnoncatError):
    """Lifetime threshold not crossed within the scan horizon."""


class NormalizationError(MagnoncatError):
    """State expected to be normalized was not."""


class DegenerateCatError(MagnoncatError):
    """Cat-size estimator found no interior fidelity maximum."""


class ConditioningError(MagnoncatError):
    """Numerical conditioning failure in a closed-form measure."""


class ConfigError(MagnoncatError):
    """Invalid run configuration."""

    def __init__(self, message, key=None, line=None):
        loc = ""
        if key is not None:
            loc += f" (key '{key}'"
            loc += f", line {line})" if line is not None else ")"
        super().__init__(message + loc)
        self.key = key
        self.line = line
