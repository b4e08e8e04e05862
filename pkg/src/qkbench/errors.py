"""Exception hierarchy shared across the package.

The CLI maps these onto process exit codes: ConfigError -> 2,
DataError -> 3, NumericalError -> 4.
"""


class QkbenchError(Exception):
    """Base class for all package-specific failures."""


class ConfigError(QkbenchError):
    """Invalid configuration value, field, or combination."""


class SizeError(ConfigError):
    """Requested state exceeds the configured qubit/memory cap."""


class DataError(QkbenchError):
    """Dataset cannot be loaded, parsed, or preprocessed."""


class EncodingError(DataError):
    """A sample cannot be embedded as a quantum state."""


class NumericalError(QkbenchError):
    """Internal numerical consistency violated (beyond tolerance slack)."""
