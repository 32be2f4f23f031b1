"""Exception hierarchy shared by all spion_mc_testbed modules."""


class SpionMcError(Exception):
    """Base class for every error raised by this package."""


class InvalidConfigError(SpionMcError, ValueError):
    pass


class InvalidParamsError(SpionMcError, ValueError):
    pass


class UnsupportedCharacterError(SpionMcError, ValueError):
    def __init__(self, position: int, character: str):
        super().__init__(f"unsupported character {character!r} at position {position}, only A-Z can be encoded")
        self.position = position
        self.character = character


class FramingError(SpionMcError, ValueError):
    pass


class SyncBitError(SpionMcError, ValueError):
    pass


class InvalidLetterError(SpionMcError, ValueError):
    pass


class ResolutionError(SpionMcError, ValueError):
    pass


class DomainError(SpionMcError, ValueError):
    pass


class ShapeError(SpionMcError, ValueError):
    pass


class DetectorParameterError(SpionMcError, ValueError):
    pass


class SyncFailureError(SpionMcError, RuntimeError):
    pass


class DegenerateSignalError(SpionMcError, RuntimeError):
    pass


class TraceTooShortError(SpionMcError, RuntimeError):
    pass


class CalibrationError(SpionMcError, RuntimeError):
    pass


class TraceFormatError(SpionMcError, ValueError):
    pass
