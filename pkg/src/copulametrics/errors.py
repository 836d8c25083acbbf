"""Exception hierarchy shared by every module in the package.

All errors raised on purpose derive from :class:`CopulaMetricsError`, so
callers (and the CLI / HTTP layers) can catch one base class and map
subclasses to exit codes or status codes.
"""


class CopulaMetricsError(Exception):
    """Base class for all errors raised by this package."""


class InvalidMatrix(CopulaMetricsError):
    """Input is not a finite, square, symmetric matrix of supported size."""


class NotPositiveDefinite(CopulaMetricsError):
    """Operation requires a strictly positive definite matrix."""


class NotPositiveSemidefinite(CopulaMetricsError):
    """Operation requires a positive semidefinite matrix."""


class SingularMatrix(CopulaMetricsError):
    """Matrix is singular (or numerically indistinguishable from singular)."""


class TooFewSamples(CopulaMetricsError):
    """Not enough observations for the requested estimate."""


class InvalidInput(CopulaMetricsError):
    """Input violates a precondition that is not covered by a finer class."""


class DegenerateInput(CopulaMetricsError):
    """Data carries no usable variation (for example a constant column)."""


class BoundaryPoint(CopulaMetricsError):
    """Evaluation point lies on the boundary of the open unit hypercube."""


class DomainError(CopulaMetricsError):
    """Scalar argument outside the mathematical domain of the function."""


class GridTooLarge(CopulaMetricsError):
    """Requested discretisation exceeds the supported cell budget."""


class IncompatibleHistograms(CopulaMetricsError):
    """Histogram pair differs in dimension or resolution."""


class InvalidDistanceMatrix(CopulaMetricsError):
    """Matrix is not a valid dissimilarity matrix (symmetry, zero diagonal)."""


class InvalidK(CopulaMetricsError):
    """Requested number of clusters is out of range for the tree."""
