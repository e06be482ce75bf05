"""Exception types raised by the library."""


class RealLifeError(Exception):
    """Base class for all library errors."""


class DimensionMismatchError(RealLifeError, ValueError):
    pass


class InvalidArgumentError(RealLifeError, ValueError):
    pass


class UnsupportedShapeError(RealLifeError, ValueError):
    pass


class UnsupportedBackendError(RealLifeError, ValueError):
    pass


class UnsupportedKernelError(RealLifeError, ValueError):
    pass


class ThresholdOrderError(RealLifeError, ValueError):
    """A threshold four-tuple violates the ordering required by its mode."""

    def __init__(self, message, inequality=None):
        super().__init__(message)
        self.inequality = inequality


class ConfigurationError(RealLifeError, ValueError):
    pass


class ResourceLimitError(RealLifeError, RuntimeError):
    pass


class UndefinedDistanceError(RealLifeError, ValueError):
    pass


class PreconditionError(RealLifeError, ValueError):
    pass
