"""Parameter domain, regime classification and stationary law of the
two-factor affine diffusion

    dY_t = (a - b Y_t) dt + sqrt(Y_t) dL_t,
    dX_t = (m - theta X_t) dt + sqrt(Y_t) dB_t,

with a > 0 and independent standard Brownian drivers L and B.  Y is a
square-root (CIR) factor that stays nonnegative and drives the volatility
of the mean-reverting factor X.

In the subcritical regime (b > 0 and theta > 0) the pair has a unique
stationary law: the Y marginal is Gamma(2a, 2b), the joint transform
E exp(-l1 Y_inf + i l2 X_inf) is an exponential of an integrated Riccati
solution, and the low-order mixed moments have closed forms.  Everything
here is a pure function of its inputs.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum

from numba import njit

from .errors import InvalidParams, NotSubcritical, StepTooLarge, TruncationTooShort

__all__ = [
    "ModelParams",
    "Criticality",
    "StationaryMoments",
    "classify",
    "mean_at",
    "stationary_moments_closed",
    "riccati_v",
    "stationary_char",
]

# Below this magnitude a mean-reversion rate is treated as exactly zero to
# avoid catastrophic cancellation in (1 - e^{-ct})/c.
_ZERO_RATE = 1e-12


@dataclass(frozen=True)
class ModelParams:
    """Drift parameters of the two-factor diffusion.

    a must be positive (it keeps Y nonnegative); b, m and theta are
    unrestricted finite reals.
    """

    a: float
    b: float
    m: float
    theta: float

    def __post_init__(self):
        vals = (self.a, self.b, self.m, self.theta)
        if not all(isinstance(v, (int, float)) and math.isfinite(v) for v in vals):
            raise InvalidParams(f"parameters must be finite reals, got {vals}")
        if self.a <= 0:
            raise InvalidParams(f"a must be > 0 (nonnegativity of Y), got {self.a}")


class Criticality(Enum):
    SUBCRITICAL = "subcritical"
    CRITICAL = "critical"
    SUPERCRITICAL = "supercritical"


def classify(p: ModelParams) -> Criticality:
    """Regime of the mean-reversion pair (b, theta).

    Subcritical iff b > 0 and theta > 0 (unique stationary distribution,
    ergodic averages converge); supercritical iff b < 0 or theta < 0;
    critical on the boundary (b = 0 with theta >= 0, or theta = 0 with
    b >= 0).
    """
    if p.b > 0 and p.theta > 0:
        return Criticality.SUBCRITICAL
    if p.b < 0 or p.theta < 0:
        return Criticality.SUPERCRITICAL
    return Criticality.CRITICAL


def _exp_integral(c: float, t: float) -> float:
    """int_0^t e^{-c s} ds with the c -> 0 limit (= t) taken explicitly."""
    if abs(c) < _ZERO_RATE:
        return t
    return -math.expm1(-c * t) / c


def mean_at(p: ModelParams, ey0: float, ex0: float, t: float) -> tuple[float, float]:
    """Exact mean curve (E Y_t, E X_t) started from means (ey0, ex0).

        E Y_t = e^{-b t} ey0 + a * int_0^t e^{-b s} ds

    and the analogue for X with (theta, m).  Valid in every regime; the
    zero-rate limit of the integral is t.
    """
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    ey = math.exp(-p.b * t) * ey0 + p.a * _exp_integral(p.b, t)
    ex = math.exp(-p.theta * t) * ex0 + p.m * _exp_integral(p.theta, t)
    return ey, ex


_MOMENT_FIELDS = (
    "ey", "ex", "ey2", "exy", "ex2", "ex2y",
    "e_inv_y", "ex_over_y", "ex2_over_y",
)


@dataclass
class StationaryMoments:
    """Stationary expectations of (Y, X).

    Fields: E Y, E X, E Y^2, E XY, E X^2, E X^2 Y, E 1/Y, E X/Y, E X^2/Y.
    The last three may be None: E 1/Y diverges for a <= 1/2, and the two
    ratio moments have no closed form and are only ever filled by long-run
    simulation.  `source` records per-field provenance ("closed-form",
    "simulated" or "unavailable"), `stderr` batch-means standard errors of
    simulated fields, and `closed` the closed-form comparators attached to
    a simulated moment set.
    """

    ey: float
    ex: float
    ey2: float
    exy: float
    ex2: float
    ex2y: float
    e_inv_y: float | None = None
    ex_over_y: float | None = None
    ex2_over_y: float | None = None
    source: dict = field(default_factory=dict)
    stderr: dict = field(default_factory=dict)
    closed: dict = field(default_factory=dict)

    def values(self) -> dict:
        return {name: getattr(self, name) for name in _MOMENT_FIELDS}

    def inequality_margins(self) -> dict[str, float]:
        """Slack of every strict moment inequality the stationary law
        satisfies; all margins must be positive.  Relations touching an
        unfilled field are omitted."""
        out = {
            "ey_pos": self.ey,
            "var_y": self.ey2 - self.ey**2,
            "var_x": self.ex2 - self.ex**2,
            # E(X^2 Y) E(Y) > (E XY)^2: Cauchy-Schwarz on X sqrt(Y), sqrt(Y)
            "ex2y_ey_vs_exy2": self.ex2y * self.ey - self.exy**2,
        }
        if self.e_inv_y is not None:
            out["e_inv_y_ey_vs_1"] = self.e_inv_y * self.ey - 1.0
        if self.ex2_over_y is not None:
            # (E X^2)^2 < E(X^2/Y) E(X^2 Y)
            out["ex2_over_y_ex2y_vs_ex2sq"] = self.ex2_over_y * self.ex2y - self.ex2**2
            if self.e_inv_y is not None and self.ex_over_y is not None:
                out["mtheta_denominator"] = (
                    self.ex2_over_y * self.e_inv_y - self.ex_over_y**2
                )
        return out


def stationary_moments_closed(p: ModelParams) -> StationaryMoments:
    """Closed-form stationary moments in the subcritical regime.

    Y_inf is Gamma(2a, 2b), which also gives E(1/Y_inf) = 2b/(2a - 1) for
    a > 1/2 (marked unavailable otherwise).  E(X/Y) and E(X^2/Y) have no
    closed form; estimate them with `asymptotics.moments_by_simulation`.
    """
    if classify(p) is not Criticality.SUBCRITICAL:
        raise NotSubcritical(
            f"closed-form stationary moments need b > 0 and theta > 0, "
            f"got b={p.b}, theta={p.theta}"
        )
    a, b, m, th = p.a, p.b, p.m, p.theta
    ey = a / b
    ex = m / th
    ey2 = a * (2 * a + 1) / (2 * b * b)
    exy = m * a / (th * b)
    ex2 = (a * th + 2 * b * m * m) / (2 * b * th * th)
    ex2y = (
        a * (th * (a * b + 2 * a * th + th) + 2 * m * m * b * (2 * th + b))
        / ((b + 2 * th) * 2 * b * b * th * th)
    )
    source = {name: "closed-form" for name in _MOMENT_FIELDS[:6]}
    if a > 0.5:
        e_inv_y = 2 * b / (2 * a - 1)
        source["e_inv_y"] = "closed-form"
    else:
        e_inv_y = None
        source["e_inv_y"] = "unavailable"  # E(1/Y) = inf for a <= 1/2
    source["ex_over_y"] = "unavailable"
    source["ex2_over_y"] = "unavailable"
    return StationaryMoments(
        ey=ey, ex=ex, ey2=ey2, exy=exy, ex2=ex2, ex2y=ex2y,
        e_inv_y=e_inv_y, source=source,
    )


@njit(cache=True, nogil=True)
def _riccati_rk4(b, theta, lam1, lam2, t_end, h):
    """Classical RK4 for v' = -b v - v^2/2 + e^{-2 theta t} lam2^2 / 2,
    v(0) = lam1, stepped jointly with u' = v so that int_0^t v ds carries
    the same fourth-order accuracy.  Returns (v(t_end), u(t_end), min v).
    """
    if t_end <= 0.0:
        return lam1, 0.0, lam1
    n = int(math.ceil(t_end / h - 1e-12))
    if n < 1:
        n = 1
    hh = t_end / n
    half_l2 = 0.5 * lam2 * lam2
    two_theta = 2.0 * theta
    v = lam1
    u = 0.0
    vmin = v
    t = 0.0
    for _ in range(n):
        f0 = half_l2 * math.exp(-two_theta * t)
        fm = half_l2 * math.exp(-two_theta * (t + 0.5 * hh))
        f1 = half_l2 * math.exp(-two_theta * (t + hh))
        k1 = -b * v - 0.5 * v * v + f0
        v2 = v + 0.5 * hh * k1
        k2 = -b * v2 - 0.5 * v2 * v2 + fm
        v3 = v + 0.5 * hh * k2
        k3 = -b * v3 - 0.5 * v3 * v3 + fm
        v4 = v + hh * k3
        k4 = -b * v4 - 0.5 * v4 * v4 + f1
        u += hh / 6.0 * (v + 2.0 * v2 + 2.0 * v3 + v4)
        v += hh / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t += hh
        if v < vmin:
            vmin = v
    return v, u, vmin


def riccati_v(
    p: ModelParams,
    lam1: float,
    lam2: float,
    t: float,
    h: float = 1e-3,
    neg_tol: float = 1e-8,
) -> float:
    """Transform exponent v_t solving

        v' = -b v - v^2/2 + e^{-2 theta t} lam2^2 / 2,   v_0 = lam1,

    by classical fourth-order Runge-Kutta with step <= h.  The true
    solution is nonnegative for lam1 >= 0; a solver value below -neg_tol
    raises StepTooLarge (refine h), values in (-neg_tol, 0) are clamped to
    zero.  Small negative lam1 is accepted (the transform extends
    analytically) and bypasses the nonnegativity guard; this supports
    numerical differentiation at lam1 = 0.
    """
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    if h <= 0:
        raise ValueError(f"h must be > 0, got {h}")
    v, _, vmin = _riccati_rk4(p.b, p.theta, float(lam1), float(lam2), float(t), float(h))
    if lam1 >= 0.0:
        if vmin < -neg_tol:
            raise StepTooLarge(
                f"solution reached {vmin:.3e} < -{neg_tol:.1e}; step h={h} too coarse"
            )
        if v < 0.0:
            v = 0.0
    return v


def _char_tail_bound(p: ModelParams, lam2: float, t_max: float, v_end: float) -> float:
    """Bound on a * int_{t_max}^inf v ds from the linearized dynamics:
    past t_max, v' <= -b v + e^{-2 theta t} lam2^2/2, so the tail integral
    is at most v(t_max)/b + lam2^2 e^{-2 theta t_max} / (4 theta b)."""
    forcing_tail = lam2 * lam2 * math.exp(-2.0 * p.theta * t_max) / (4.0 * p.theta * p.b)
    return p.a * (max(v_end, 0.0) / p.b + forcing_tail)


def _char_with_tail(p, lam1, lam2, t_max, h, neg_tol):
    v_end, integral, vmin = _riccati_rk4(
        p.b, p.theta, float(lam1), float(lam2), float(t_max), float(h)
    )
    if lam1 >= 0.0 and vmin < -neg_tol:
        raise StepTooLarge(
            f"solution reached {vmin:.3e} < -{neg_tol:.1e}; step h={h} too coarse"
        )
    tail = _char_tail_bound(p, lam2, t_max, v_end)
    value = cmath.exp(complex(-p.a * integral, p.m / p.theta * lam2))
    return value, tail


def stationary_char(
    p: ModelParams,
    lam1: float,
    lam2: float,
    t_max: float | None = None,
    h: float = 1e-3,
    tail_tol: float = 1e-6,
    neg_tol: float = 1e-8,
) -> complex:
    """Joint stationary transform E exp(-lam1 Y_inf + i lam2 X_inf).

    Equals exp(-a int_0^inf v_s(lam1, lam2) ds + i (m/theta) lam2); the
    integral is truncated at t_max, by default max(20/b, 20/theta), past
    which v decays like e^{-b s} once the e^{-2 theta s} forcing is spent.
    The neglected tail is bounded through the linearized dynamics and
    raises TruncationTooShort above tail_tol.  Quadrature of int v ds is
    carried inside the same RK4 step as v itself.

    With lam2 = 0 this is the Laplace transform of the Gamma(2a, 2b)
    marginal, (1 + lam1/(2b))^(-2a), which serves as the accuracy oracle.
    """
    if classify(p) is not Criticality.SUBCRITICAL:
        raise NotSubcritical(
            f"stationary law needs b > 0 and theta > 0, got b={p.b}, theta={p.theta}"
        )
    if t_max is None:
        t_max = max(20.0 / p.b, 20.0 / p.theta)
    value, tail = _char_with_tail(p, lam1, lam2, t_max, h, neg_tol)
    if tail > tail_tol:
        raise TruncationTooShort(
            f"tail bound {tail:.3e} exceeds {tail_tol:.1e}; increase t_max ({t_max})"
        )
    return value
