"""Exception types shared across the package."""


class HalfDiracError(Exception):
    """Base class for all package-specific errors."""


class OutsideBulkBand(HalfDiracError):
    """Requested energy lies at or below the bulk band edge."""


class SingularAtOrigin(HalfDiracError):
    """Section evaluated at the momentum-space phase singularity k=0."""


class BranchError(HalfDiracError):
    """Square-root branch convention cannot be satisfied."""


class NoConvergence(HalfDiracError):
    """Adaptive refinement failed to stabilize.

    Carries the partial result (if any) in ``result``.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class NotSelfAdjoint(HalfDiracError):
    """Boundary condition fails the self-adjointness relations."""


class NotRank2(HalfDiracError):
    """Boundary matrix A(kx) is not rank 2 for almost every kx."""


class InternalContradiction(HalfDiracError):
    """A self-adjoint input reduced to an impossible canonical form.

    Usually indicates a tolerance failure, or one of the measure-zero
    configurations outside the canonical parametrization.
    """


class ConstraintViolation(HalfDiracError):
    """Class constructor parameters violate the row constraints."""


class DegenerateRoots(HalfDiracError):
    """Two transverse momentum roots coincide (band-edge energy)."""


class NotInGap(HalfDiracError):
    """Number of strictly decaying transverse roots is not two."""


class PoleAtThreshold(HalfDiracError):
    """Scattering denominator vanishes on the sampled line."""


class WindowTooNarrow(HalfDiracError):
    """An edge branch reaches the kx grid boundary unresolved."""


class AmbiguousContinuation(HalfDiracError):
    """Two edge branches approach within the continuation tolerance."""


class UnknownClass(HalfDiracError):
    """Class tag not among the seven admissible ones."""


class NotAWorkedExample(HalfDiracError):
    """No closed-form asymptotic curve is hardcoded for this label."""
