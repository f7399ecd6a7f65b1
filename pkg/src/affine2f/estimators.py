"""Closed-form drift estimators.

Every estimator is a pure function of SufficientStats (plus the known m
where applicable): the path enters only through those statistics.  The
2x2 normal-equation systems are solved by their explicit Cramer formulas
so each returned component is bit-auditable against the displayed ratios.
Denominator positivity holds almost surely on model paths; a
DegenerateDenominator therefore signals misuse (constant input, corrupt
data), never a soft failure.

The likelihood machinery is validated for a >= 1/2 (with the joint
estimate requiring a > 1/2); smaller a is outside validated territory but
the formulas still evaluate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDenominator
from .model import ModelParams
from .pathstats import SufficientStats

__all__ = [
    "MleFull",
    "LseFull",
    "mle_theta_known_m",
    "mle_full",
    "lse_theta_known_m",
    "lse_full",
    "lse_discrete",
    "loglik",
]


@dataclass(frozen=True)
class MleFull:
    """Joint likelihood-maximizing estimate of (a, b, m, theta)."""

    a_hat: float
    b_hat: float
    m_hat: float
    theta_hat: float
    denom_ab: float       # int Y ds * int (1/Y) ds - T^2
    denom_mtheta: float   # int (X^2/Y) ds * int (1/Y) ds - (int (X/Y) ds)^2

    def to_json(self) -> dict:
        return {
            "estimator": "mle_full",
            "values": {
                "a": self.a_hat, "b": self.b_hat,
                "m": self.m_hat, "theta": self.theta_hat,
            },
            "denominators": {
                "denom_ab": self.denom_ab, "denom_mtheta": self.denom_mtheta,
            },
            "valid": True,
        }


@dataclass(frozen=True)
class LseFull:
    """Joint least-squares estimate of (m, theta) from X alone."""

    m_hat: float
    theta_hat: float
    denom: float          # T * int X^2 ds - (int X ds)^2

    def to_json(self) -> dict:
        return {
            "estimator": "lse_full",
            "values": {"m": self.m_hat, "theta": self.theta_hat},
            "denominators": {"denom": self.denom},
            "valid": True,
        }


def mle_theta_known_m(s: SufficientStats, m: float) -> float:
    """Likelihood-maximizing theta when m is known:
    (-int (X/Y) dX + m int (X/Y) ds) / int (X^2/Y) ds."""
    if s.int_x2_over_y_ds <= 0:
        raise DegenerateDenominator(
            f"int (X^2/Y) ds = {s.int_x2_over_y_ds} must be > 0"
        )
    return (-s.int_x_over_y_dx + m * s.int_x_over_y_ds) / s.int_x2_over_y_ds


def mle_full(s: SufficientStats) -> MleFull:
    """Joint likelihood-maximizing (a, b, m, theta).

    (a, b) solves the 2x2 system with matrix [[int 1/Y ds, -T],
    [-T, int Y ds]] and right side (int (1/Y) dY, -(Y_T - Y_0)); (m, theta)
    solves [[int 1/Y ds, -int X/Y ds], [-int X/Y ds, int X^2/Y ds]] with
    right side (int (1/Y) dX, -int (X/Y) dX).  Components are the explicit
    Cramer ratios.
    """
    t = s.t_end
    denom_ab = s.int_y_ds * s.int_inv_y_ds - t * t
    if denom_ab <= 0:
        raise DegenerateDenominator(
            f"int Y ds * int (1/Y) ds - T^2 = {denom_ab} must be > 0"
        )
    denom_mtheta = s.int_x2_over_y_ds * s.int_inv_y_ds - s.int_x_over_y_ds**2
    if denom_mtheta <= 0:
        raise DegenerateDenominator(
            f"int (X^2/Y) ds * int (1/Y) ds - (int (X/Y) ds)^2 = {denom_mtheta} "
            "must be > 0"
        )
    a_hat = (s.int_y_ds * s.int_inv_y_dy - t * s.delta_y) / denom_ab
    b_hat = (t * s.int_inv_y_dy - s.delta_y * s.int_inv_y_ds) / denom_ab
    m_hat = (
        s.int_x2_over_y_ds * s.int_inv_y_dx
        - s.int_x_over_y_ds * s.int_x_over_y_dx
    ) / denom_mtheta
    theta_hat = (
        s.int_x_over_y_ds * s.int_inv_y_dx
        - s.int_inv_y_ds * s.int_x_over_y_dx
    ) / denom_mtheta
    return MleFull(a_hat, b_hat, m_hat, theta_hat, denom_ab, denom_mtheta)


def lse_theta_known_m(s: SufficientStats, m: float) -> float:
    """Least-squares theta from X alone when m is known:
    -(int X dX - m int X ds) / int X^2 ds."""
    if s.int_x2_ds <= 0:
        raise DegenerateDenominator(f"int X^2 ds = {s.int_x2_ds} must be > 0")
    return -(s.int_x_dx - m * s.int_x_ds) / s.int_x2_ds


def lse_full(s: SufficientStats) -> LseFull:
    """Joint least-squares (m, theta) from X alone."""
    t = s.t_end
    denom = t * s.int_x2_ds - s.int_x_ds**2
    if denom <= 0:
        raise DegenerateDenominator(
            f"T int X^2 ds - (int X ds)^2 = {denom} must be > 0"
        )
    m_hat = (s.delta_x * s.int_x2_ds - s.int_x_ds * s.int_x_dx) / denom
    theta_hat = (s.delta_x * s.int_x_ds - t * s.int_x_dx) / denom
    return LseFull(m_hat, theta_hat, denom)


def lse_discrete(x_obs, m: float | None = None) -> tuple[float | None, float]:
    """Least-squares drift estimates from unit-spaced observations
    X_0, ..., X_n of the second coordinate alone.

    With m supplied, returns (None, theta_tilde) where

        theta_tilde = -(sum (X_i - X_{i-1}) X_{i-1} - m sum X_{i-1})
                       / sum X_{i-1}^2;

    otherwise the joint minimizers (m_hat, theta_hat) of
    sum (X_i - X_{i-1} - (m - theta X_{i-1}))^2.  At a fixed sampling
    interval this is a diagnostic companion to the continuous-observation
    estimators, not a drop-in replacement.
    """
    x = np.asarray(x_obs, dtype=np.float64)
    if x.ndim != 1 or len(x) < 2:
        raise ValueError(f"x_obs must be a 1-D array of n+1 >= 2 values, got {x.shape}")
    n = len(x) - 1
    xp = x[:-1]
    dx = np.diff(x)
    s_prev = float(xp.sum())
    s_prev2 = float(np.dot(xp, xp))
    s_dx = float(dx.sum())
    s_dx_prev = float(np.dot(dx, xp))
    if m is not None:
        if s_prev2 <= 0:
            raise DegenerateDenominator(f"sum X_prev^2 = {s_prev2} must be > 0")
        return None, -(s_dx_prev - m * s_prev) / s_prev2
    denom = n * s_prev2 - s_prev**2
    if denom <= 0:
        raise DegenerateDenominator(
            f"n sum X_prev^2 - (sum X_prev)^2 = {denom} must be > 0"
        )
    m_hat = (s_prev2 * s_dx - s_prev * s_dx_prev) / denom
    theta_hat = (s_prev * s_dx - n * s_dx_prev) / denom
    return m_hat, theta_hat


def loglik(s: SufficientStats, p: ModelParams) -> float:
    """Log-likelihood of the drift parameters against the (1, 0, 0, 0)
    reference measure, as a function of the sufficient statistics:

        (a-1) int (1/Y) dY - b (Y_T - Y_0) + m int (1/Y) dX
        - theta int (X/Y) dX - (a^2-1)/2 int (1/Y) ds + a b T
        - b^2/2 int Y ds - m^2/2 int (1/Y) ds + m theta int (X/Y) ds
        - theta^2/2 int (X^2/Y) ds.

    Quadratic in (a, b, m, theta) with block Hessians
    -[[int 1/Y ds, -T], [-T, int Y ds]] and
    -[[int 1/Y ds, -int X/Y ds], [-int X/Y ds, int X^2/Y ds]].
    """
    a, b, m, th = p.a, p.b, p.m, p.theta
    return (
        (a - 1.0) * s.int_inv_y_dy
        - b * s.delta_y
        + m * s.int_inv_y_dx
        - th * s.int_x_over_y_dx
        - 0.5 * (a * a - 1.0) * s.int_inv_y_ds
        + a * b * s.t_end
        - 0.5 * b * b * s.int_y_ds
        - 0.5 * m * m * s.int_inv_y_ds
        + m * th * s.int_x_over_y_ds
        - 0.5 * th * th * s.int_x2_over_y_ds
    )
