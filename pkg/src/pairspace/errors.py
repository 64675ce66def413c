"""Exception types shared across the package."""

from __future__ import annotations


class PairSpaceError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatchError(PairSpaceError):
    """A state and a mass system disagree on the number of bodies."""


class ConstraintViolationError(PairSpaceError):
    """A pair state violates a triangle condition beyond tolerance.

    Attributes:
        triplet: 0-based body indices (i, j, k) of the worst offender.
        residual: norm of q_ij + q_jk + q_ki for that triplet.
        tolerance: absolute tolerance the residual was compared against.
    """

    def __init__(self, triplet, residual, tolerance):
        self.triplet = tuple(triplet)
        self.residual = float(residual)
        self.tolerance = float(tolerance)
        i, j, k = (p + 1 for p in self.triplet)
        super().__init__(
            f"triangle condition violated for bodies ({i},{j},{k}): "
            f"residual {self.residual:.3e} exceeds tolerance {self.tolerance:.3e}"
        )


class CollisionError(PairSpaceError):
    """Two bodies are closer than the collision threshold.

    Attributes:
        pair: 0-based body indices (i, j) of the colliding pair.
        separation: their distance at the time of the error.
    """

    def __init__(self, pair, separation, time=None):
        self.pair = tuple(pair)
        self.separation = float(separation)
        self.time = time
        i, j = (p + 1 for p in self.pair)
        at = "" if time is None else f" at t={time:.6g}"
        super().__init__(
            f"collision singularity between bodies {i} and {j}{at}: "
            f"separation {self.separation:.3e}"
        )


class ValidationError(PairSpaceError):
    """Invalid user-supplied configuration or input file."""
