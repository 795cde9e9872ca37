"""Exception hierarchy shared by the simulator, pipeline and CLI."""


class RFSwarmError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(RFSwarmError, ValueError):
    pass


class SingularityError(RFSwarmError, ZeroDivisionError):
    pass


class FormationError(RFSwarmError, ValueError):
    """Raised when drones in a formation are closer than half a wavelength."""

    def __init__(self, message, pairs=()):
        super().__init__(message)
        self.pairs = list(pairs)


class EmptyTraceError(RFSwarmError, ValueError):
    pass


class InsufficientDataError(RFSwarmError, ValueError):
    pass


class InconsistentRecordingsError(RFSwarmError, ValueError):
    pass


class UndefinedMetricError(RFSwarmError, ValueError):
    pass


class ConfigError(RFSwarmError, ValueError):
    pass
