"""Exception types shared across the package."""


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class NotPositiveDefiniteError(DomainError):
    """Matrix expected to be Hermitian positive definite is not."""


class InsufficientDofError(DomainError):
    """Wishart degrees of freedom smaller than the matrix dimension."""


class UnsupportedDimensionError(DomainError):
    """Operation only defined for a specific matrix dimension."""


class SingularTransformError(ValueError):
    """Congruence transform is singular or numerically singular."""


class EigenSolverError(RuntimeError):
    """The underlying Hermitian eigenvalue routine failed to converge."""
