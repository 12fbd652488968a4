"""Exception hierarchy shared across the package."""


class MatinvError(Exception):
    """Base class for all package errors."""


class NearSingular(MatinvError):
    """Matrix determinant is below the invertibility floor."""


class RankConstructionFailed(MatinvError):
    """Could not construct a matrix of the requested numerical rank."""


class RegionUnsafe(MatinvError):
    """Box region failed its singular-set clearance certification."""


class RankPreconditionFailed(MatinvError):
    """Witness matrix is not rank n-1 (adjugate vanishes)."""


class SearchExhausted(MatinvError):
    """Adversarial search underflowed without finding a violation."""


class NonFiniteLoss(MatinvError):
    """Training loss became NaN or infinite."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = list(trace) if trace is not None else []


class SchemaError(MatinvError):
    """Checkpoint or config file violates the expected schema."""


class EmptyRegion(MatinvError):
    """LP phase one proved the constraint region infeasible."""


class ConfigError(MatinvError):
    """Invalid or unparsable configuration."""
