"""Exception hierarchy shared by all dskplab modules."""


class DskpError(ValueError):
    """Base class for dskplab errors."""


class SingularError(DskpError):
    """A recurrence step or ratio evaluation hit an indeterminate form."""


class WindowTooSmallError(DskpError):
    """A square cone leaves the finite window of the initial data."""


class SizeGuardError(DskpError):
    """An exhaustive enumeration exceeds its configured guard."""

    def __init__(self, what: str, size: int, limit: int):
        super().__init__(
            f"{what} has size {size}, above the guard {limit}. "
            "Raise DSKP_SIZE_GUARD to run it anyway (at your own risk)."
        )
        self.size = size
        self.limit = limit


class TruncationError(DskpError):
    """Series precision was not sufficient to resolve a leading coefficient."""
