"""Exception types shared across the package."""


class ResourceGuardError(RuntimeError):
    """A size or memory guard rejected the requested computation."""


class NumericalError(RuntimeError):
    """A numerical routine failed or violated a guaranteed contract."""


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""
