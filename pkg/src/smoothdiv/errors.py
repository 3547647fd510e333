"""Exception types shared across the package."""


class GridAlignmentError(ValueError):
    """The step size does not divide the unit interval exactly."""


class GridRangeError(ValueError):
    """An evaluation or integral reaches past the tabulated range: extend the grid."""


class QuadratureError(RuntimeError):
    """Adaptive refinement exceeded without reaching the requested tolerance."""


class SieveLimitError(ValueError):
    """Requested sieve exceeds the memory guard."""
