"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain where an operation is defined."""


class DivergenceError(ArithmeticError):
    """An integral or supremum that should be finite is infinite."""


class PreconditionError(ValueError):
    """Input violates a structural requirement (e.g. a non-member profile)."""
