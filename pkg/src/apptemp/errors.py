"""Exception hierarchy.

Three families map onto CLI exit codes: configuration problems (2),
numerical failures where a tolerance was breached (3) and Fock
truncation that is too small for the requested state (4).
"""


class ApptempError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(ApptempError):
    pass


class NumericalFailure(ApptempError):
    pass


# operator-core
class NonHermitianInput(NumericalFailure):
    pass


class DimensionMismatch(ApptempError, ValueError):
    pass


class UndeclaredFactorization(ApptempError, ValueError):
    pass


class InvalidDensityMatrix(NumericalFailure):
    pass


# eigenops
class FrequencyNotInSpectrum(ApptempError, KeyError):
    pass


# thermo
class NonLadderInput(NumericalFailure):
    pass


class NegativeBranch(NumericalFailure):
    pass


class ShapeMismatch(ApptempError, ValueError):
    pass


class FrequencyMismatch(ApptempError, ValueError):
    pass


class NegativeValue(NumericalFailure):
    pass


class ZeroFrequency(ApptempError, ValueError):
    pass


class UndefinedComparison(ApptempError):
    """Raised when an undefined temperature takes part in an ordering."""


# dynamics
class MissingSpectralValue(ApptempError, KeyError):
    pass


class NegativeRate(ApptempError, ValueError):
    pass


class StepTooLarge(NumericalFailure):
    pass


class PositivityLost(NumericalFailure):
    pass


class NoPhysicalSteadyState(NumericalFailure):
    pass


class InvalidCollisionSpec(ConfigError):
    pass


# models
class DimensionTooLarge(ApptempError, ValueError):
    pass


class InvalidState(NumericalFailure):
    pass


class TruncationInsufficient(ApptempError):
    pass


# experiments
class UnknownExperiment(ConfigError):
    pass


class SchemaViolation(ConfigError):
    pass
