"""Exception types shared across the toolkit."""


class FtnError(Exception):
    """Base class for all toolkit errors."""


class ParameterError(FtnError, ValueError):
    """A configuration value or argument is outside its admissible range."""


class SpectrumError(FtnError):
    """The folded tap spectrum is not strictly positive, so no causal factor exists."""


class FactorizationError(FtnError):
    """Spectral factorization did not reach the requested residual.

    Carries the modulus of the worst offending zero and the achieved residual
    so callers can report how close the factorization came.
    """

    def __init__(self, message, root_modulus=None, residual=None):
        super().__init__(message)
        self.root_modulus = root_modulus
        self.residual = residual


class ModelError(FtnError):
    """The discrete channel model is inconsistent or numerically invalid."""


class SearchSpaceError(FtnError):
    """An exhaustive search space exceeds the configured candidate guard."""


class ConditioningError(FtnError):
    """A matrix is too ill-conditioned for the requested computation."""
