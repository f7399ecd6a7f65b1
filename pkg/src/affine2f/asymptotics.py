"""Asymptotic covariances of the drift estimators.

The scaled errors sqrt(T) (estimate - truth) are asymptotically normal in
the subcritical regime; their covariances are rational functions of nine
stationary expectations.  Six of those have closed forms; E 1/Y does too
(Gamma marginal, a > 1/2), while E X/Y and E X^2/Y are only reachable by
long-run time averaging (ergodic theorem), so simulated moment sets carry
batch-means standard errors and the closed-form comparators travel along.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np

from .errors import DegenerateMoments, NotSubcritical
from .model import (
    _MOMENT_FIELDS,
    Criticality,
    ModelParams,
    StationaryMoments,
    classify,
    stationary_moments_closed,
)
from .simulate import GridSpec, RngStream, Scheme, simulate_stationary_start

__all__ = [
    "MleCovariance",
    "LseCovariance",
    "moments_by_simulation",
    "hybrid_moments",
    "sigma_mle",
    "sigma_lse",
    "theta_mle_variance_known_m",
    "theta_lse_variance_known_m",
    "variance_orderings",
]


@dataclass(frozen=True)
class MleCovariance:
    """4x4 covariance of sqrt(T)-scaled joint likelihood-estimate errors,
    coordinates (a, b, m, theta); exactly block diagonal, the (a, b) block
    driven by the Y moments and the (m, theta) block by the ratio moments.
    """

    sigma: np.ndarray
    moments: StationaryMoments

    def to_json(self) -> dict:
        return {
            "shape": [4, 4],
            "sigma": [float(v) for v in self.sigma.ravel()],  # row-major
            "moments": self.moments.values(),
            "provenance": dict(self.moments.source),
        }


@dataclass(frozen=True)
class LseCovariance:
    """2x2 covariance of sqrt(T)-scaled joint least-squares errors,
    coordinates (m, theta)."""

    sigma: np.ndarray
    moments: StationaryMoments

    def to_json(self) -> dict:
        return {
            "shape": [2, 2],
            "sigma": [float(v) for v in self.sigma.ravel()],
            "moments": self.moments.values(),
            "provenance": dict(self.moments.source),
        }


def moments_by_simulation(
    p: ModelParams,
    t_total: float,
    dt: float,
    burn_in: float = 0.0,
    rng: RngStream = RngStream(0),
    n_batches: int = 32,
) -> StationaryMoments:
    """Stationary moments as time averages over [burn_in, t_total] of one
    stationary-start path (left rectangle rule, matching the path
    functionals).  All nine fields are filled and marked "simulated", each
    with a batch-means standard error; closed-form comparators are
    attached in `.closed` for the fields that have one.

    The 1/Y averages are finite time averages in any case, but they only
    estimate finite limits when a > 1/2; smaller a triggers a warning.
    """
    if classify(p) is not Criticality.SUBCRITICAL:
        raise NotSubcritical(
            f"ergodic averaging needs b > 0 and theta > 0, got b={p.b}, theta={p.theta}"
        )
    if p.a <= 0.5:
        warnings.warn(
            f"a = {p.a} <= 1/2: E(1/Y) is infinite, inverse-moment averages "
            "do not converge",
            RuntimeWarning,
            stacklevel=2,
        )
    if not 0 <= burn_in < t_total:
        raise ValueError(f"need 0 <= burn_in < t_total, got {burn_in}, {t_total}")
    grid = GridSpec(t_end=t_total, dt=dt)
    path = simulate_stationary_start(p, grid, burn_in=0.0, scheme=Scheme.EXACT, rng=rng)
    k0 = round(burn_in / dt)
    y = path.y[k0:-1]  # left endpoints of the kept interval
    x = path.x[k0:-1]
    inv_y = 1.0 / y
    samples = {
        "ey": y,
        "ex": x,
        "ey2": y * y,
        "exy": x * y,
        "ex2": x * x,
        "ex2y": x * x * y,
        "e_inv_y": inv_y,
        "ex_over_y": x * inv_y,
        "ex2_over_y": x * x * inv_y,
    }
    est, se = {}, {}
    batch = max(1, len(y) // n_batches)
    usable = batch * (len(y) // batch)
    for name, arr in samples.items():
        est[name] = float(arr.mean())
        means = arr[:usable].reshape(-1, batch).mean(axis=1)
        se[name] = float(means.std(ddof=1) / np.sqrt(len(means)))
    closed_ref = stationary_moments_closed(p)
    closed = {
        name: val for name, val in closed_ref.values().items() if val is not None
    }
    return StationaryMoments(
        **est,
        source={name: "simulated" for name in _MOMENT_FIELDS},
        stderr=se,
        closed=closed,
    )


def hybrid_moments(p: ModelParams, simulated: StationaryMoments) -> StationaryMoments:
    """Closed forms wherever they exist, simulated values for the rest
    (the two ratio moments, plus E 1/Y when a <= 1/2).  Standard errors of
    the simulated fields are kept."""
    out = stationary_moments_closed(p)
    fill = {}
    for name in ("e_inv_y", "ex_over_y", "ex2_over_y"):
        if getattr(out, name) is None:
            fill[name] = getattr(simulated, name)
            out.source[name] = "simulated"
            if name in simulated.stderr:
                out.stderr[name] = simulated.stderr[name]
    return replace(out, **fill) if fill else out


def _require(mom: StationaryMoments, names) -> None:
    missing = [n for n in names if getattr(mom, n) is None]
    if missing:
        raise DegenerateMoments(f"moments {missing} are unavailable")


def sigma_mle(mom: StationaryMoments) -> MleCovariance:
    """Block-diagonal 4x4 asymptotic covariance of the joint likelihood
    estimate.  With u = E 1/Y, w = E Y, r1 = E X/Y, r2 = E X^2/Y:

        (a, b) block    [[w, 1], [1, u]] / (u w - 1),
        (m, theta) block [[r2, r1], [r1, u]] / (u r2 - r1^2).
    """
    _require(mom, ("e_inv_y", "ex_over_y", "ex2_over_y"))
    u, w = mom.e_inv_y, mom.ey
    r1, r2 = mom.ex_over_y, mom.ex2_over_y
    d1 = u * w - 1.0
    d2 = u * r2 - r1 * r1
    if d1 <= 0 or d2 <= 0:
        raise DegenerateMoments(
            f"covariance denominators must be > 0, got {d1} and {d2}"
        )
    sigma = np.zeros((4, 4))
    sigma[:2, :2] = np.array([[w, 1.0], [1.0, u]]) / d1
    sigma[2:, 2:] = np.array([[r2, r1], [r1, u]]) / d2
    return MleCovariance(sigma=sigma, moments=mom)


def sigma_lse(mom: StationaryMoments) -> LseCovariance:
    """2x2 asymptotic covariance of the joint least-squares estimate of
    (m, theta), rational in (E X, E X^2, E Y, E XY, E X^2 Y) with common
    denominator (E X^2 - (E X)^2)^2."""
    ex, ex2, ey, exy, ex2y = mom.ex, mom.ex2, mom.ey, mom.exy, mom.ex2y
    var_x = ex2 - ex * ex
    if var_x <= 0:
        raise DegenerateMoments(f"E X^2 - (E X)^2 = {var_x} must be > 0")
    den = var_x * var_x
    s11 = (ex * ex * ex2y - 2.0 * ex * ex2 * exy + ex2 * ex2 * ey) / den
    s12 = (ex * (ex2y + ex2 * ey) - exy * (ex2 + ex * ex)) / den
    s22 = (ex2y - 2.0 * ex * exy + ex * ex * ey) / den
    return LseCovariance(sigma=np.array([[s11, s12], [s12, s22]]), moments=mom)


def theta_mle_variance_known_m(mom: StationaryMoments) -> float:
    """Asymptotic variance 1 / E(X^2/Y) of the known-m likelihood theta."""
    _require(mom, ("ex2_over_y",))
    if mom.ex2_over_y <= 0:
        raise DegenerateMoments(f"E(X^2/Y) = {mom.ex2_over_y} must be > 0")
    return 1.0 / mom.ex2_over_y


def theta_lse_variance_known_m(mom: StationaryMoments) -> float:
    """Asymptotic variance E(X^2 Y) / (E X^2)^2 of the known-m
    least-squares theta."""
    if mom.ex2 <= 0:
        raise DegenerateMoments(f"E X^2 = {mom.ex2} must be > 0")
    return mom.ex2y / (mom.ex2 * mom.ex2)


def variance_orderings(mom: StationaryMoments) -> dict:
    """Verdicts, with margins, for the asymptotic-variance comparisons:

    (i)  knowing m never hurts the likelihood theta: 1/E(X^2/Y) is at most
         the joint-estimate theta variance (equality iff E(X/Y) = 0);
    (ii) the known-m likelihood theta beats the known-m least-squares
         theta: 1/E(X^2/Y) < E(X^2 Y)/(E X^2)^2 (strict Cauchy-Schwarz);
    (iii) the known-m least-squares variance against both entries of the
         joint least-squares covariance — the single intended comparison
         entry is ambiguous, so both are reported.

    Margin = rhs - lhs; the ordering holds when the margin is nonnegative
    (strictly positive for (ii)).
    """
    _require(mom, _MOMENT_FIELDS)
    v_mle = theta_mle_variance_known_m(mom)
    v_lse = theta_lse_variance_known_m(mom)
    s_mle = sigma_mle(mom).sigma
    s_lse = sigma_lse(mom).sigma
    def entry(lhs, rhs, strict=False):
        margin = rhs - lhs
        return {
            "lhs": lhs,
            "rhs": rhs,
            "holds": bool(margin > 0 if strict else margin >= 0),
            "margin": margin,
        }
    return {
        "mle_known_m_vs_joint_theta": entry(v_mle, float(s_mle[3, 3])),
        "mle_vs_lse_known_m": entry(v_mle, v_lse, strict=True),
        "lse_known_m_vs_joint_22": entry(v_lse, float(s_lse[1, 1])),
        "lse_known_m_vs_joint_11": entry(v_lse, float(s_lse[0, 0])),
    }
