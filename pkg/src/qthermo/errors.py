"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input is outside the mathematical domain of an operation."""


class ContractError(ValueError):
    """An object violates a structural contract (Hermiticity, trace, completeness)."""


class DegenerateStateError(DomainError):
    """A state construction collapsed to the zero vector and cannot be normalized."""


class ConfigError(ValueError):
    """A scan configuration file is malformed or inconsistent."""


class NumericError(RuntimeError):
    """A computation produced a singular or non-finite result."""
