"""Exception types shared across the package."""


class MoebiusError(Exception):
    """Base class for all errors raised by this package."""


class InputError(MoebiusError, ValueError):
    """Invalid argument or malformed input data (CLI exit code 2)."""


class NumericalError(MoebiusError, RuntimeError):
    """An iteration failed to converge or a result is numerically unusable
    (CLI exit code 3)."""


class CapacityError(InputError):
    """A truncated basis is too small to represent the requested object."""
