"""Exception types shared across the package."""


class IrsDdpgError(Exception):
    """Base class for all package errors."""


class NumericalInputError(IrsDdpgError, ValueError):
    """Raised when an input array contains NaN or infinite entries."""


class DegenerateInputError(IrsDdpgError, ValueError):
    """Raised when an input cannot be normalized (e.g. an all-zero precoder)."""


class ShapeMismatchError(IrsDdpgError, ValueError):
    """Raised when array shapes or widths are incompatible."""


class InsufficientEntriesError(IrsDdpgError):
    """Raised when a replay buffer holds fewer entries than requested."""


class IntegrityError(IrsDdpgError):
    """Raised when a checkpoint file is truncated, corrupt, or of unknown version."""


class ConfigError(IrsDdpgError, ValueError):
    """Raised for malformed experiment configuration text.

    ``line`` is the 1-based line number the problem was found on, or ``None``
    when the error is not tied to a particular line.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
