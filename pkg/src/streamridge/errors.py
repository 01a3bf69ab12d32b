"""Exception taxonomy shared across the package.

The CLI maps these onto exit codes: InputError/UsageError -> 1,
FormatError -> 2, NumericalError -> 3.
"""


class StreamRidgeError(Exception):
    """Base class for all package errors."""


class InputError(StreamRidgeError, ValueError):
    """Caller supplied inconsistent shapes, invalid parameters, or non-finite data."""


class FormatError(StreamRidgeError):
    """A dataset or checkpoint file is malformed.

    Carries the byte offset at which parsing failed, when known.
    """

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class NumericalError(StreamRidgeError):
    """A linear-algebra kernel failed; usually signals a corrupted state."""


class UsageError(StreamRidgeError):
    """An operation was invoked in a state that cannot support it."""
