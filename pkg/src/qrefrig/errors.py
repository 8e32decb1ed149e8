"""Exception types shared across the package."""


class QrefrigError(Exception):
    """Base class for all package-specific errors."""


class ValidityDomainError(QrefrigError, ValueError):
    """A first-order partition function left its validity domain.

    Raised when the linear-in-lambda correction would drive a partition
    value non-positive, i.e. the anharmonic strength is too large for the
    truncated expansion to mean anything.
    """


class TruncationError(QrefrigError, RuntimeError):
    """A truncated spectrum cannot meet the requested Gibbs tail bound."""


class ConvergenceError(QrefrigError, RuntimeError):
    """An iterative scheme (eigensolver doubling, quadrature refinement,
    root finding) failed to converge within its iteration budget."""
