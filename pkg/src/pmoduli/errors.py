"""Exception hierarchy shared across the package."""


class PmoduliError(Exception):
    """Base class for all package-specific errors."""


class InvalidInputError(PmoduliError, ValueError):
    """Malformed or non-finite input data."""


class ParameterError(InvalidInputError):
    """Parameter outside the admissible range of an operation."""


class DegenerateMatrixError(PmoduliError, ArithmeticError):
    """A matrix is singular where a nondegenerate one is required."""


class DomainError(PmoduliError, ValueError):
    """A point lies outside the domain of a mapping or stencil."""


class SingularityError(DomainError):
    """A point lies on the singular locus of a mapping derivative."""


class PreconditionError(PmoduliError, RuntimeError):
    """A scenario precondition (an earlier criterion) failed to hold."""


class ConvergenceError(PmoduliError, RuntimeError):
    """Iterative solver exhausted its budget before reaching tolerance."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations
