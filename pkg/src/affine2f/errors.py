"""Typed errors raised across the toolkit.

The split matters for callers: `AffineError` subclasses flag degenerate or
out-of-regime inputs discovered at run time, while plain ``ValueError``
subclasses (grid, parameter and shape validation) flag misconfiguration.
"""


class AffineError(Exception):
    """Base class for toolkit-specific runtime errors."""


class InvalidParams(ValueError):
    """Model parameters outside the admissible domain (e.g. a <= 0)."""


class InvalidGrid(ValueError):
    """Grid step does not tile the horizon, or nonpositive step/horizon."""


class LengthMismatch(ValueError):
    """Integrand and integrator arrays differ in length."""


class NegativeY0(ValueError):
    """Initial value of the nonnegative factor is negative."""


class NotSubcritical(AffineError):
    """Operation requires the ergodic regime b > 0 and theta > 0."""


class StepTooLarge(AffineError):
    """ODE solution went negative beyond tolerance; refine the step."""


class TruncationTooShort(AffineError):
    """Estimated integral tail beyond the truncation horizon exceeds tolerance."""


class NonpositiveY(AffineError):
    """A 1/Y integrand hit a nonpositive Y value on the grid."""

    def __init__(self, index: int, value: float):
        self.index = index
        self.value = value
        super().__init__(
            f"nonpositive y value {value!r} at grid index {index}; "
            "the step may be too coarse or the level too close to zero"
        )


class DegenerateDenominator(AffineError):
    """An estimator denominator is not strictly positive.

    Positivity holds almost surely on model paths, so this signals
    pipeline misuse (constant inputs, corrupted data).
    """


class DegenerateMoments(AffineError):
    """Moment set incomplete or violating the strict inequalities needed
    by a covariance formula."""
