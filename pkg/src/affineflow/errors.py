"""Exception types shared across the package.

Plain invalid arguments raise ValueError; these two classes exist so the
CLI can map file-format and configuration problems to distinct exit codes.
"""


class FormatError(Exception):
    """A file does not conform to its expected binary/text format."""


class ConfigError(Exception):
    """A configuration value or combination of values is unusable."""
