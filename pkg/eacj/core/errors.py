"""
Exceptions raised by the eacj modules.

All of them derive from `EacjError`, so the command line can report any
library failure the same way. The value-style errors also derive from the
builtin `ValueError`.
"""


class EacjError(Exception):
    """Base class for all eacj errors."""


class EventParseError(EacjError, ValueError):
    """A line of an event (or junction / track) file cannot be parsed.

    The 1-based `lineno` is kept on the instance and prefixed to the message.
    """

    def __init__(self, message, lineno=None, path=None):
        self.reason = message
        self.lineno = lineno
        self.path = path
        where = ""
        if path:
            where += f"{path}:"
        if lineno is not None:
            where += f"line {lineno}: "
        elif path:
            where += " "
        super().__init__(where + message)


class BoundsError(EacjError, ValueError):
    """A pixel position falls outside the sensor."""


class GeometryError(EacjError, ValueError):
    """A patch is too small for the geometry it is tested with."""


class ConfigError(EacjError, ValueError):
    """Invalid configuration value or unsupported setting."""


class ParameterError(EacjError, ValueError):
    """Invalid argument to a statistical or detection routine."""


class RangeError(EacjError, ValueError):
    """A value lies outside a precomputed or declared range."""
