"""
Exception hierarchy for Vesselcast.

Each error carries the process exit code the command-line frontend reports
for it: 2 configuration, 3 I/O, 4 insufficient data, 5 model/schema.
"""

from typing import Optional


class VesselcastError(Exception):
    """Base class for all library errors."""
    exit_code: int = 1


class ConfigError(VesselcastError):
    """A flag, config file entry or column mapping is unusable."""
    exit_code = 2


class InvalidInputError(VesselcastError, ValueError):
    """An argument violates an operation's precondition."""
    exit_code = 2


class UndefinedBearingError(InvalidInputError):
    """Bearing between two coordinate-identical points."""


class InvalidIntervalError(InvalidInputError):
    """Non-positive time interval."""


class DataIOError(VesselcastError):
    """A source could not be read or a sink could not be written."""
    exit_code = 3


class InsufficientDataError(InvalidInputError):
    """Too few records, examples or trips for the requested work."""
    exit_code = 4


class ModelFormatError(VesselcastError):
    """A serialized model is corrupted or truncated."""
    exit_code = 5

    def __init__(self, section: str, message: str, line: Optional[int] = None):
        self.section = section
        self.line = line
        where = f"section {section}" + (f", line {line}" if line is not None else "")
        super().__init__(f"{where}: {message}")


class UnsupportedVersionError(ModelFormatError):
    """The model file was written by an unknown format version."""

    def __init__(self, version: str):
        super().__init__("VERSION", f"unsupported model format version {version!r}")
        self.version = version


class SchemaError(VesselcastError):
    """Feature vectors do not match the model's recorded feature order."""
    exit_code = 5
