"""Exception hierarchy shared by all modules."""


class CavsimError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(CavsimError, ValueError):
    """An input violates a documented invariant."""


class ConfigError(CavsimError):
    """A scenario configuration is malformed or inconsistent.

    ``key`` holds the dotted path of the offending entry when one applies.
    """

    def __init__(self, reason: str, key: str | None = None):
        self.key = key
        self.reason = reason
        super().__init__(f"{key}: {reason}" if key else reason)


class IntegrationError(CavsimError):
    """Time stepping failed; ``iteration`` is the step index that failed."""

    def __init__(self, reason: str, iteration: int | None = None):
        self.iteration = iteration
        self.reason = reason
        msg = reason if iteration is None else f"iteration {iteration}: {reason}"
        super().__init__(msg)
