"""Exception hierarchy for mcflab."""


class MCFLabError(Exception):
    """Base class for all mcflab errors."""


class ConfigurationError(MCFLabError):
    """Raised when a configuration document is missing, malformed or invalid."""


class InvariantViolation(MCFLabError):
    """Raised when an internal invariant (e.g. area monotonicity) fails at runtime."""


# Geometry

class GeometryError(MCFLabError):
    """Base class for geometry errors."""


class InvalidImmersion(GeometryError):
    """Raised when an immersion violates its construction invariants."""


class DegenerateGeometry(GeometryError):
    """Raised when a segment or profile radius collapses below the floor."""


class LengthMismatch(GeometryError):
    """Raised when a per-sample field does not match the sample count."""


class UnsupportedRepresentation(GeometryError):
    """Raised when an operation is not defined for the given representation."""


class BadShapeParameters(GeometryError):
    """Raised by the initial-shape factory for invalid shape parameters."""


# Analysis

class AnalysisError(MCFLabError):
    """Base class for flow and analysis errors."""


class StepUnderflow(AnalysisError):
    """Raised when the adaptive time step drops below the configured floor."""

    def __init__(self, dt: float, dt_floor: float):
        super().__init__(f"time step {dt:.3e} below floor {dt_floor:.3e}")
        self.dt = dt
        self.dt_floor = dt_floor


class InsufficientSamples(AnalysisError):
    """Raised when a fit has too few records to work with."""


class WindowOutOfRange(AnalysisError):
    """Raised when a rescaling window maps outside the source trajectory."""


class IndexOutOfRange(AnalysisError):
    """Raised when a frame index has no neighbours for central differences."""


class RedistributionActive(AnalysisError):
    """Raised when residuals are requested across a tangential redistribution."""


class NonPositiveH(AnalysisError):
    """Raised when the pinching ratio is requested where H <= 0."""


class DimensionTooSmall(AnalysisError):
    """Raised when the Sobolev/Moser machinery is asked for n < 3."""


class NonPositiveInputs(AnalysisError):
    """Raised when a constant chain receives non-positive inputs."""


class TrajectoryTooShort(AnalysisError):
    """Raised when a trajectory does not cover the requested smooth interval."""


class MissingAccumulator(AnalysisError):
    """Raised when a (quantity, alpha) accumulator was not registered for a run."""


# Process exit codes used by the command-line interface
EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_FAILURE = 3
