"""Exception hierarchy.

Every error raised on purpose by the package derives from
:class:`NmNormalError`, so callers (the CLI in particular) can separate
bad input from internal faults.
"""


class NmNormalError(Exception):
    """Base class for all deliberate errors in this package."""


class InvalidInputError(NmNormalError, ValueError):
    """Input is malformed: wrong rank, non-finite entries, bad shape."""


class DimensionMismatchError(InvalidInputError):
    pass


class NotHermitianError(InvalidInputError):
    pass


class NegativeEigenvalueError(InvalidInputError):
    pass


class MetricViolationError(InvalidInputError):
    """A seminorm evaluation produced a clearly negative radicand."""


class SpectrumNegativeError(NmNormalError, ValueError):
    """A principal square root was requested for a matrix without one.

    Raised when the spectrum leaves the closed right half-line by more than
    the residual tolerance, or when the square-back check fails.
    """

    def __init__(self, message, eigenvalues=None):
        super().__init__(message)
        self.eigenvalues = eigenvalues


class NotInBAError(NmNormalError, ValueError):
    """Operator does not admit an A-adjoint (fails ``R(T*A) ⊆ R(A)``)."""


class NotInBUpperAError(NmNormalError, ValueError):
    """Operator is not bounded for the A-seminorm."""


class InvariantError(NmNormalError, RuntimeError):
    """A post-construction invariant failed; indicates a numerical fault."""


class IndexRangeError(InvalidInputError):
    pass


class InfeasibleSpecError(InvalidInputError):
    """A generator spec asks for something that cannot be built."""


class UnknownCheckError(NmNormalError, KeyError):
    pass


class UnknownTargetError(NmNormalError, KeyError):
    pass


class ShiftInvariantError(InvalidInputError):
    """Weighted-shift data violates membership or A-boundedness."""
