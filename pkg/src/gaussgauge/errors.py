"""Exception types shared across the toolkit."""


class GaussGaugeError(Exception):
    """Base class for all toolkit errors."""


class DimensionError(GaussGaugeError):
    """Inconsistent matrix/vector dimensions or quadrature orderings."""


class StabilityError(GaussGaugeError):
    """A drift matrix violates the stability assumption of the operation."""


class DegenerateSpectrumError(GaussGaugeError):
    """The matrix-equation system is singular (resonant eigenvalue pair)."""


class NotGaugeableError(GaussGaugeError):
    """Displacement cannot be removed: I - X is singular."""


class PhysicalityError(GaussGaugeError):
    """Input state or bath covariance violates the uncertainty constraint."""


class DegenerateModelError(GaussGaugeError):
    """Model parameters degenerate (e.g. drift-aligned diffusion with B = 0)."""


class ConvergenceError(GaussGaugeError):
    """An iterative solver exhausted its iteration budget."""
