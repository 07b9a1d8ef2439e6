"""Exception hierarchy shared by every module of the package."""


class HeisenbergError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(HeisenbergError, ValueError):
    """An argument violates a documented precondition."""


class DomainError(HeisenbergError, ValueError):
    """A value lies outside the domain where the quantity is defined."""


class DivergenceError(HeisenbergError, ArithmeticError):
    """An integral (norm, constant, operator value) does not converge.

    ``endpoint`` names the failing end: ``"origin"``, ``"infinity"`` or a
    free-form description.
    """

    def __init__(self, message, endpoint=None):
        super().__init__(message)
        self.endpoint = endpoint


class AccuracyError(HeisenbergError, ArithmeticError):
    """Requested accuracy not reached; ``result`` holds the best estimate."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result
