class KestrelError(Exception):
    """Base class for errors raised by Kestrel."""


class ContractViolationError(KestrelError):
    """
    A precondition of an operation does not hold.

    Not a `ValueError`, so pydantic validators let it through unwrapped.
    """


class NumericError(KestrelError, ArithmeticError):
    """A computation produced or received non-finite or ill-conditioned values."""


class BehindCameraError(ContractViolationError):
    """A point lies on or behind the camera image plane."""


class ConfigError(KestrelError, ValueError):
    """
    Scenario or configuration validation failed.

    Args:
        key (str): Dotted path of the offending key, e.g. ``scenario.dt``.
        message (str): What was expected.
    """

    def __init__(self, key: str, message: str) -> None:
        self.key = key
        self.message = message
        super().__init__(f"{key}: {message}" if key else message)

    def __reduce__(self):
        return type(self), (self.key, self.message)
