class InvalidInputError(ValueError):
    """Malformed or inconsistent input (bad shapes, violated preconditions)."""


class NumericalError(ArithmeticError):
    """A computation hit a numerical degeneracy it cannot recover from."""
