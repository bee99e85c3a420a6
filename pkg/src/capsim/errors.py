"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument or parameter lies outside the valid domain of an operation."""


class DivergenceError(RuntimeError):
    """The integrated state became non-finite.

    Carries the last time at which the state was still finite.
    """

    def __init__(self, message: str, t_last: float):
        super().__init__(message)
        self.t_last = t_last


class ConfigError(ValueError):
    """A scenario configuration file is malformed or inconsistent."""
