"""Exception hierarchy shared by the stretchlab modules."""


class StretchLabError(Exception):
    """Base class for all library errors."""


class InputError(StretchLabError, ValueError):
    """Bad arguments: unknown indices, out-of-range parameters."""


class InvalidMetricError(StretchLabError, ValueError):
    """Edge lengths that violate the strict triangle inequality."""


class StructuralError(StretchLabError, ValueError):
    """Combinatorial structure is missing or broken (non-manifold mesh,
    non-product collar, cycle outside a collar, ...)."""


class PreconditionError(StretchLabError, ValueError):
    """An operation was called on data that does not satisfy its contract."""


class InfeasibleVolumeError(StretchLabError, ValueError):
    """No region reaches the requested volume within tolerance."""


class SizeError(StretchLabError, ValueError):
    """Problem too large for exhaustive enumeration."""
