"""Exception types shared across the package.

Every failure mode that callers are expected to branch on gets its own
class; all inherit from SusyLabError so blanket handling stays possible.
"""


class SusyLabError(Exception):
    """Base class for all susylab errors."""


class ParameterError(SusyLabError, ValueError):
    """Invalid or inconsistent parameter set for a superpotential class."""


class DomainError(SusyLabError, ValueError):
    """Evaluation point lies outside the open domain of the instance."""


class SingularityError(SusyLabError, ValueError):
    """Evaluation point falls inside the exclusion band around a pole."""


class UnsupportedClassError(SusyLabError):
    """Operation is not defined for this superpotential class."""


class PhaseError(SusyLabError):
    """Operation requires the opposite supersymmetry phase."""


class IndeterminatePhaseError(SusyLabError):
    """A boundary sign of W vanishes; the phase cannot be decided."""


class HierarchyError(SusyLabError):
    """Requested level violates the eigenvalue-ordering condition."""


class UnsupportedParametersError(SusyLabError):
    """Parameter combination for which the case analysis rules out BSWKB."""


class NoTurningPointsError(SusyLabError):
    """The energy lies below the minimum of W**2; no classical region."""


class SingleIntersectionError(SusyLabError):
    """W**2 = E has a single solution; the action integral is undefined."""


class NegativeIntegrandError(SusyLabError):
    """E - W**2 is materially negative inside the bracketed interval."""


class ConvergenceFailureError(SusyLabError):
    """An iterative scheme hit its node or iteration cap before converging."""


class GridTooCoarseError(SusyLabError):
    """Two-grid eigenvalue shift exceeds the comparison tolerance."""


class TruncationError(SusyLabError):
    """The potential cannot confine the requested levels on any finite grid."""


class EmptyInputError(SusyLabError, ValueError):
    """An operation received an empty list where data was required."""


class BracketError(SusyLabError):
    """Root bracketing failed to find a sign change before the boundary."""
