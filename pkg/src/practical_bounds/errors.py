class ConfigError(ValueError):
    """Inputs exceed a configured resource guard or are malformed."""


class ConsistencyError(RuntimeError):
    """A certified computation produced an internally inconsistent result."""
