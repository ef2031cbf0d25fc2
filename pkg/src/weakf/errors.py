"""Exception types shared across the package."""


class WeakFError(Exception):
    """Base class for all package errors."""


class InvalidPoint(WeakFError):
    """A chart point contains non-finite entries or has the wrong length."""


class SingularEvaluation(WeakFError):
    """Division or sqrt hit the guard band around its singular set."""


class ShapeError(WeakFError):
    """Tensor operands have incompatible shapes or variances."""


class DegenerateMetric(WeakFError):
    """Metric matrix failed the SPD check (Cholesky) at a point."""


class NotSelfAdjoint(WeakFError):
    """Operator violates g-self-adjointness beyond tolerance."""


class DegreeError(WeakFError):
    """Wedge product would exceed the chart dimension."""


class CrossCheckMismatch(WeakFError):
    """Two independent evaluation routes disagree beyond tolerance."""


class NotKilling(WeakFError):
    """Vector field failed the Killing precondition at the point."""


class AmbiguousSpectrum(WeakFError):
    """Eigenvalue clusters are separated by less than twice the cluster tolerance."""


class HypothesisFailed(WeakFError):
    """A theorem hypothesis required by the requested diagnostic does not hold."""


class InvalidParameter(WeakFError):
    """Constructor parameter outside its documented range."""


class ConfigError(WeakFError):
    """Run configuration or structure file could not be parsed/validated."""
