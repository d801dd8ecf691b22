"""Exception types raised by the engine."""


class OnticError(Exception):
    """Base class for all engine errors."""


class DimensionError(OnticError, ValueError):
    """A mode or basis dimension is invalid."""


class CapacityError(OnticError, ValueError):
    """A construction would exceed a configured size cap."""

    def __init__(self, message, attempted=None, cap=None):
        super().__init__(message)
        self.attempted = attempted
        self.cap = cap


class BasisMismatchError(OnticError, ValueError):
    """Operands live on different Fock bases."""


class LabelShapeError(OnticError, ValueError):
    """An ontic label has the wrong shape or values."""


class TruncationError(OnticError, ValueError):
    """The requested state is not representable at this truncation."""


class CommensurabilityError(OnticError, ValueError):
    """An evolution time is not a multiple of the lattice time step."""


class SingularSpinorError(OnticError, ZeroDivisionError):
    """A helicity spinor formula has a vanishing denominator."""


class ConfigError(OnticError, ValueError):
    """A run configuration is invalid; ``path`` names the offending field."""

    def __init__(self, message, path=None):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
