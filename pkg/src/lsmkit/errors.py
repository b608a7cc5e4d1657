"""Exception types shared across the package."""


class ConfigError(ValueError):
    """A parameter combination violates a construction contract."""


class NumericsError(ArithmeticError):
    """Simulation state contains non-finite values."""


class DatasetError(ValueError):
    """Dataset samples are inconsistent with each other or with the config."""
