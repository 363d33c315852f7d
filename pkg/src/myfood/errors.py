class MyfoodError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(MyfoodError):
    """An input violates a documented precondition."""
