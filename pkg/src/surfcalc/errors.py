"""Exception types raised by surfcalc operations."""


class SurfcalcError(Exception):
    """Base class for all surfcalc errors."""


class SingularMetric(SurfcalcError):
    """Metric determinant fell below the configured floor (degenerate chart)."""


class CornerNode(SurfcalcError):
    """Co-normal requested at a junction of two boundary segments.

    The co-normal is one-sided there; the caller must name a segment.
    """


class DegenerateSegment(SurfcalcError):
    """Boundary line element vanishes at a quadrature node."""


class InsufficientTimeLevels(SurfcalcError):
    """A time-derivative operation needs at least three stored time levels."""


class StepTooSmall(SurfcalcError):
    """Finite-difference step ladder is dominated by rounding cancellation."""


class CFLViolation(SurfcalcError):
    """Requested time step exceeds the explicit stability bound."""


class NonpositiveDensity(SurfcalcError):
    """Density lost positivity during a simulation step."""


class NonpositiveThermo(SurfcalcError):
    """Density or temperature is nonpositive in a thermodynamic evaluation."""


class ConfigError(SurfcalcError):
    """Scenario configuration violates the documented schema."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"config field '{field}': {message}")
