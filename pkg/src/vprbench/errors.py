"""Exception hierarchy.

Every error raised by the toolkit derives from :class:`VprBenchError`.  The
two intermediate classes tell the CLI which exit code to use: configuration
problems exit with 2, bad input data with 3.
"""


class VprBenchError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(VprBenchError, ValueError):
    """Invalid parameters or run configuration."""


class DataError(VprBenchError):
    """Input data that cannot be used (images, logs, descriptor files)."""


# -- configuration / parameter errors --------------------------------------

class InvalidParam(ConfigError):
    pass


class InvalidSize(ConfigError):
    pass


class InvalidRegion(ConfigError):
    pass


class GridMismatch(ConfigError):
    pass


class DimMismatch(ConfigError):
    pass


class KindMismatch(ConfigError):
    pass


class ProtocolError(VprBenchError, RuntimeError):
    """Telemetry API used out of order (e.g. ``end`` without ``begin``)."""


# -- data errors ------------------------------------------------------------

class NotFound(DataError, FileNotFoundError):
    pass


class DecodeError(DataError):
    pass


class EmptyDescriptorSet(DataError):
    pass


class ParseError(DataError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EmptyLog(DataError):
    pass


class EmptyWindow(DataError):
    pass


class LayoutError(DataError):
    pass


class GroundTruthError(DataError):
    pass


class AlignmentError(DataError):
    pass


class FormatError(DataError):
    pass


class IoError(DataError, OSError):
    pass
