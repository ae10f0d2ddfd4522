"""Exception and warning classes shared across the package."""


class GaudinWronskiError(Exception):
    """Base class for all errors raised by this package."""


class PreconditionError(GaudinWronskiError, ValueError):
    """An argument violates a documented precondition."""


class UnsupportedCaseError(PreconditionError):
    """The requested formula is not defined for this input (e.g. n < 2)."""


class DomainError(GaudinWronskiError, ValueError):
    """A point lies outside the configuration domain.

    Raised when Bethe roots coincide with each other or with a marked point,
    or when marked points are not pairwise distinct.
    """


class NoSolutionError(GaudinWronskiError):
    """An overdetermined linear system turned out to be inconsistent."""


class DegeneratePlaneError(PreconditionError):
    """A plane of polynomials is not nondegenerate."""


class InvarianceError(GaudinWronskiError):
    """An operator does not preserve the subspace it was restricted to."""


class DivisionRemainderError(GaudinWronskiError):
    """A polynomial division expected to be exact left a remainder."""


class UnderCountWarning(RuntimeWarning):
    """The Bethe solver found fewer orbits than the known dimension."""


class DomainCollapseWarning(RuntimeWarning):
    """Most Newton starts left the configuration domain."""
