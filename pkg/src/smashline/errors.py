"""Exception types raised across the package."""


class SmashlineError(ValueError):
    pass


class InvalidOrderError(SmashlineError):
    """Nilpotency order below 2."""


class InvalidDegreeError(SmashlineError):
    """A xi-degree at or beyond the nilpotency order."""


class DomainError(SmashlineError):
    """Parameters outside the domain of an operation.

    ``min_n`` is set when the failure is a too-small step count.
    """

    def __init__(self, message, min_n=None):
        super().__init__(message)
        self.min_n = min_n


class UnsupportedError(SmashlineError):
    """Operation only defined for a restricted parameter set."""
