"""Exception hierarchy shared by all simulation stages."""


class SlowLightError(Exception):
    """Base class for every error raised by this package."""


class InvalidArgumentError(SlowLightError, ValueError):
    pass


class ResolutionError(SlowLightError, ValueError):
    """The grid is too coarse (or too narrow) for the requested quantity."""


class FrequencyRangeError(SlowLightError, ValueError):
    pass


class WindowTooShortError(SlowLightError, ValueError):
    """Propagated energy leaked into the edges of the time window."""


class ConfigError(SlowLightError, ValueError):
    """Configuration validation failure; ``path`` is the dotted field path."""

    def __init__(self, path: str, reason: str):
        self.path = path
        self.reason = reason
        super().__init__(f"{path}: {reason}")
