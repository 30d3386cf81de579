"""Exception hierarchy for the gerbe calculator.

Every numerically dangerous precondition (cuts hitting eigenvalues,
ambiguous eigenvalue clusters, branch-cut violations, ...) raises a
dedicated subclass of :class:`GerbeError` so callers can distinguish
"bad input" from genuine bugs.
"""


class GerbeError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(GerbeError):
    """Matrix shapes are incompatible with the requested operation."""


class AmbiguousClusterError(GerbeError):
    """Eigenvalue chain cannot be split into clusters at the given tolerance."""


class IllConditionedCutError(GerbeError):
    """A cut point lies too close to an eigenvalue of g."""


class BranchCutError(GerbeError):
    """Argument of a cut logarithm lies on (or too near) the cut ray."""


class BoundaryError(GerbeError):
    """A point coincides with an arc endpoint where betweenness is undefined."""


class IncomparableError(GerbeError):
    """Two cut points (or two fiber elements) cannot be compared."""


class UnsupportedOrderError(GerbeError):
    """Residue evaluation requested for a pole order above 3."""


class EmptySpaceError(GerbeError):
    """A determinant-line operation was asked for an empty eigenspace."""


class StepTooLargeError(GerbeError):
    """A finite-difference excursion would push an eigenvalue across a cut."""


class GapError(GerbeError):
    """An eigenvalue is not isolated well enough for the requested formula."""


class RealignmentError(GerbeError):
    """Frames along a curve drifted too far to be continuously aligned."""


class EvaluationError(GerbeError):
    """An integrand produced a non-finite value."""


class RegularityError(GerbeError):
    """The group element is not regular (has a repeated eigenvalue)."""


class SamplingError(GerbeError):
    """Rejection sampling failed to produce a valid point."""


class SchemaError(GerbeError):
    """A JSON document does not match the expected schema."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")
