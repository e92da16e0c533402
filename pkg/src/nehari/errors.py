"""Exception types raised by the solvers."""


class NehariError(Exception):
    """Base class for solver errors."""


class SignMismatch(NehariError):
    """Field is outside the cone required by the fibering formula."""


class NoAdmissibleField(NehariError):
    """No candidate with positive weighted mass exists (h <= 0 on the region)."""


class InfeasibleConstraint(NehariError):
    """The extreme-value feasible set is empty (no field with F >= 0)."""


class DegenerateScaling(NehariError):
    """Residual has no interior minimum over the searched scale range."""


class EmptyCone(NehariError):
    """No feasible starting field found for a cone minimization."""


class NoConvergence(NehariError):
    """Iteration ended without meeting the residual tolerance."""


class SeparationFailed(NehariError):
    """No admissible separation parameter below the extreme value."""


class PlateauNotFound(NehariError):
    """The restricted minimum already moves one bisection step from mu0."""


class ContinuationStall(NehariError):
    """Consecutive continuation minimizers drifted apart too far."""


class BoundaryHit(NehariError):
    """Restricted minimizer landed on the cone boundary (lambda too large)."""


class BoundaryMinimizerNotFound(NehariError):
    """No minimizer found on the cone boundary face."""


class PathCollapse(NehariError):
    """Path knots merged during optimization."""


class MaxSweepsExceeded(NehariError):
    """String method did not settle within the sweep budget."""


class ConvergedToFirstSolution(NehariError):
    """Saddle refinement collapsed onto the first solution."""


class ConfigError(NehariError):
    """Run configuration is invalid or unreadable."""
