"""Exception taxonomy shared across the library.

Every error raised on purpose by this package derives from IllumDepthError,
so callers can catch one base class at CLI or harness boundaries.
"""


class IllumDepthError(Exception):
    """Base class for all errors raised deliberately by this package."""


class DimensionMismatch(IllumDepthError):
    """Operands live in different ambient dimensions."""


class DegenerateInput(IllumDepthError):
    """Input point set is not full-dimensional (affine dimension < d)."""


class EmptyRegion(IllumDepthError):
    """A halfspace intersection or depth region has no points at all."""


class DegenerateRegion(IllumDepthError):
    """A region exists but has zero volume, where positive volume is required."""


class DomainError(IllumDepthError):
    """Scalar argument outside the mathematical domain of the function."""


class ModeUnsupported(IllumDepthError):
    """Requested computation mode is not available for these inputs."""


class SingularScatter(IllumDepthError):
    """Scatter estimate is rank deficient and cannot be normalised."""


class QuantileUndefined(IllumDepthError):
    """A required quantile of the fitted radial law is not positive."""


class InsufficientTail(IllumDepthError):
    """Too few usable order statistics to estimate a tail index."""


class InflationOverflow(IllumDepthError):
    """Inflation factor overflows floating point range."""


class ConfigError(IllumDepthError):
    """Experiment or CLI configuration is inconsistent."""
