"""Exception types raised across the package."""


class MzboundError(Exception):
    """Base class for all package errors."""


class DimensionError(MzboundError, ValueError):
    """Photon-number cutoffs of two objects are incompatible."""


class DegenerateInputError(MzboundError, ValueError):
    """Input has no photons where at least one is required."""


class ParameterError(MzboundError, ValueError):
    """A model parameter is outside its allowed range."""


class InputError(MzboundError, ValueError):
    """Malformed data handed to an operation (unnormalized, missing shots, ...)."""


class GridError(MzboundError, ValueError):
    """Phase grid does not meet the requirements of an operation."""


class IdentifiabilityError(MzboundError, ValueError):
    """A least-squares fit is under-determined on the given grid."""


class UndefinedVisibilityError(MzboundError, ArithmeticError):
    """The mean (zeroth Fourier) component vanishes."""


class BoundArithmeticError(MzboundError, ArithmeticError):
    """The alternating binomial sum of the classical bound vanished."""
