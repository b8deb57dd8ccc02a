"""Exception hierarchy shared by the library and the command line."""


class FavardError(Exception):
    """Base class for all favardlab errors."""

    exit_code = 1


class InputValidationError(FavardError, ValueError):
    exit_code = 4


class UnsupportedModeError(FavardError, ValueError):
    exit_code = 4


class ResourceLimitError(FavardError, MemoryError):
    """Raised when a computation would exceed a configured size cap."""

    exit_code = 3

    def __init__(self, what, needed, cap, cap_name="max_intervals"):
        self.needed = needed
        self.cap = cap
        self.cap_name = cap_name
        super().__init__(
            f"{what} needs {needed} entries, exceeding the cap {cap_name}={cap}"
        )


class LayoutOverflowError(FavardError, ValueError):
    exit_code = 4


class DataError(FavardError, ValueError):
    exit_code = 4
