"""Error taxonomy mapped onto process exit codes by the command line layer.

ConfigError -> exit 1, OSError -> exit 2, DataError -> exit 3.
"""


class ConfigError(Exception):
    """Invalid or inconsistent configuration (bad flag values, empty globs)."""


class DataError(Exception):
    """Malformed reference data that cannot be skipped (gazetteer geometry,
    schema mismatches between files being compared)."""
