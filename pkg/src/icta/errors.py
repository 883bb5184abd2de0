"""Exception hierarchy shared by the modelling and calibration modules."""


class ICTAError(Exception):
    """Base class for all package errors."""


class DomainError(ICTAError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class DivergenceError(DomainError):
    """Raised when the pump strength reaches the parametric instability (Xi >= 1)."""


class NumericalError(ICTAError, RuntimeError):
    """A numerical procedure failed to converge.

    Parameters
    ----------
    message : str
        Human readable description.
    diagnostics : dict, optional
        Free-form state at the point of failure (estimates, error, panel count...).
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class BandwidthRangeError(DomainError):
    """The 3 dB band cannot be bracketed inside the supplied grid."""


class FitError(NumericalError):
    """Least-squares fit failed; ``best`` holds the best-so-far result if any."""

    def __init__(self, message, best=None, diagnostics=None):
        super().__init__(message, diagnostics)
        self.best = best


class SeedingError(DomainError):
    """Not enough distinct peaks in the data to seed the requested model order."""


class CalibrationError(ICTAError, ValueError):
    """Measured spectra are inconsistent with the calibration model."""


class GridMismatchError(CalibrationError):
    """Spectra that must share a frequency grid do not."""
