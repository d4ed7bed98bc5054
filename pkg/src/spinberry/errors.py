"""Exception hierarchy shared by all modules."""


class SpinBerryError(Exception):
    """Base class for every error raised by this package."""


class ZeroSpinVector(SpinBerryError, ValueError):
    pass


class ZeroSpinor(SpinBerryError, ValueError):
    pass


class PoleSingularity(SpinBerryError, ValueError):
    """A point lies on (or too close to) the s_z axis where the gauge is singular."""


class QuadratureDivergence(SpinBerryError):
    """The momentum profile does not decay fast enough for the chosen cutoff."""


class DegenerateDenominator(SpinBerryError):
    pass


class StepTooLarge(SpinBerryError):
    """Richardson estimate of the finite-difference truncation error exceeds the limit."""


class SparseContour(SpinBerryError):
    """Successive states along a contour overlap too weakly for a reliable discrete phase."""


class MeshInconsistent(SpinBerryError):
    pass


class SelfIntersection(SpinBerryError):
    pass


class NonUnitDirection(SpinBerryError, ValueError):
    pass


class ConfigError(SpinBerryError, ValueError):
    """Invalid run configuration (CLI exit code 1)."""
