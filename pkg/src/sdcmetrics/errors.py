"""Exception types raised by the toolkit.

The CLI maps each class onto a process exit code.
"""


class SDCError(Exception):
    """Base class for every error raised by sdcmetrics."""

    exit_code = 1


class ConfigError(SDCError, ValueError):
    """Invalid parameters, options or sweep configuration."""

    exit_code = 1


class DataError(SDCError, ValueError):
    """Malformed or incompatible input data."""

    exit_code = 2


class NumericError(SDCError, ArithmeticError):
    """A numerical routine could not produce a result (e.g. singular covariance)."""

    exit_code = 3
