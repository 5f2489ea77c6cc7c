"""Exception types raised by the library.

CLI maps EpqedError subclasses to exit code 3 (numerical failure) and
ConfigError to exit code 2.
"""


class EpqedError(Exception):
    """Base class for all library errors."""


class ConfigError(EpqedError, ValueError):
    """Invalid experiment configuration."""


class InvalidCutoffError(EpqedError, ValueError):
    """Fock cutoff below the minimum of 2."""


class EmbedError(EpqedError, ValueError):
    """Operator dimension does not match the target slot."""


class BuildError(EpqedError, ValueError):
    """Layout and parameters are inconsistent."""


class AccuracyError(EpqedError, RuntimeError):
    """Fixed-step integration accuracy check failed."""

    def __init__(self, message: str, suggested_step: float | None = None):
        super().__init__(message)
        self.suggested_step = suggested_step


class DegenerateSteadyStateError(EpqedError, RuntimeError):
    """Liouvillian kernel is more than one-dimensional."""


class TruncationError(EpqedError, RuntimeError):
    """Correlation-function window too short for the requested accuracy."""


class UndefinedPurcellError(EpqedError, ValueError):
    """Purcell factor requested with zero free-space rate."""


class DivergenceError(EpqedError, ValueError):
    """Closed-form expression diverges at the requested phase."""


class NoBicError(EpqedError, ValueError):
    """No bound state exists for the given coupling and decay rates."""


class CooperativityUndefinedError(EpqedError, ValueError):
    """Cooperativity 8g^2/(kappa*gamma) undefined for gamma = 0."""


class FitError(EpqedError, RuntimeError):
    """Lineshape fit failed (no peak, bad data)."""


class RateUndefinedError(EpqedError, ValueError):
    """Decay-rate extraction impossible on the given window."""


class StatisticsUndefinedError(EpqedError, RuntimeError):
    """Photon statistics undefined because the mode population vanishes."""
