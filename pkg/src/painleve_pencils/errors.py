"""Exception hierarchy shared by all modules."""


class PencilError(Exception):
    """Base class for every error raised by the package."""


class UnrecognizedProfile(PencilError):
    """Root/corank profile of a pencil matches none of the supported types."""


class BranchPole(PencilError, ValueError):
    """Uniformization evaluated at a pole (w = 0 or a vanishing denominator)."""


class ChartDegenerate(PencilError, ValueError):
    """Chart matrix requested at a branch fiber or at infinity."""


class OnBaseQuadric(PencilError):
    """Both forms of the pencil vanish, so lambda is indeterminate."""


class InfiniteLambda(PencilError):
    """Only Q_inf vanishes: the point lies on the fiber lambda = infinity."""


class Indeterminate(PencilError):
    """Input is (numerically) an indeterminacy point of a birational map."""


class RootPairMismatch(PencilError):
    """The two roots of an auxiliary quadratic gave different results."""


class ProbeFailed(PencilError):
    """A singularity confinement probe did not show the expected pattern."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class OffPencilFiber(PencilError, ValueError):
    """Point does not lie on the quadric the map was asked to act on."""


class CollapsedImage(PencilError):
    """All homogeneous coordinates of an image vanish."""


class StageError(PencilError):
    """A stage of the 3D step failed; ``stage`` names it, ``cause`` is the original error."""

    def __init__(self, stage, cause):
        super().__init__(f"stage {stage} failed: {cause!r}")
        self.stage = stage
        self.cause = cause


class PrecisionExhausted(PencilError):
    """Accumulated conditioning predicts a relative error above the budget."""


class NotSymmetric(PencilError, ValueError):
    """Configuration does not satisfy the family's symmetry constraints."""


class ConstraintViolated(PencilError, ValueError):
    """Family parameters violate the constraint that makes the base points a pencil."""


class DegenerateParameter(PencilError, ValueError):
    """Coincident base points or excluded parameter values."""


class LiftInconsistent(PencilError):
    """Computed P-pencil does not contain the restriction class of Q_inf."""
