"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Raised when an input violates a documented precondition."""


class OracleSizeError(ValueError):
    """Raised when the exhaustive matching oracle is asked to exceed its size guard."""


class InvariantViolation(RuntimeError):
    """Raised when a runtime check that must hold deterministically fails.

    The message names the offending seed where one is known, so a failing
    run can be replayed exactly.
    """
