class DomainError(ValueError):
    """An operation was called outside its domain."""


class ConfigError(ValueError):
    """An experiment or model description is invalid."""


class NumericalError(RuntimeError):
    """A numerical routine could not deliver a trustworthy value."""
