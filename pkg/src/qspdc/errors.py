"""Exception types raised across the package."""


class QSPDCError(Exception):
    """Base class for all package errors."""


class OutOfWindow(QSPDCError, ValueError):
    """Wavelength outside the declared transparency window of a Sellmeier set."""


class Evanescent(QSPDCError, ValueError):
    """Transverse wavenumber at or beyond the total wavenumber."""


class GridTooCoarse(QSPDCError, ValueError):
    """Sampling grid does not resolve the pump or the requested band."""


class DomainError(QSPDCError, ValueError):
    """Argument outside the domain where a closed-form law is defined."""


class StepTooLarge(QSPDCError, RuntimeError):
    """Step doubling changed an ODE result by more than the tolerance."""


class NegativeEstimate(QSPDCError, ArithmeticError):
    """Ordering correction produced a negative photon-number estimate."""


class EmptyPixel(QSPDCError, ValueError):
    """A detection pixel captures no grid modes."""


class ConfigError(QSPDCError, ValueError):
    """Run configuration failed schema validation."""


class ValidationFailure(QSPDCError, RuntimeError):
    """A validation residual exceeded its threshold."""


class IoError(QSPDCError, OSError):
    """Output could not be written or an artifact failed verification."""
