"""Pathwise integral functionals of a sample path.

Stochastic integrals are adapted (left-endpoint) Riemann-Stieltjes sums;
time integrals use the left rectangle rule on purpose: with one common
quadrature the discrete Cauchy-Schwarz inequalities between them, e.g.
int Y ds * int 1/Y ds >= T^2, hold exactly at every step size, so the
positivity checks on estimator denominators are sharp rather than
approximate.  int X dX is evaluated through the quadratic-variation
identity X_T^2 - X_0^2 = 2 int X dX + int Y ds, which makes it a function
of the observable X endpoints and int Y ds; the raw Stieltjes sum is kept
available as a diagnostic only.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import LengthMismatch, NonpositiveY
from .simulate import SamplePath

__all__ = [
    "SufficientStats",
    "stieltjes_sum",
    "time_integral",
    "ito_x_dx",
    "sufficient_stats",
    "sufficient_stats_prefix",
]


@dataclass(frozen=True)
class SufficientStats:
    """The thirteen integral functionals every drift estimator is built from."""

    t_end: float
    delta_y: float             # Y_T - Y_0
    delta_x: float             # X_T - X_0
    int_inv_y_dy: float        # int (1/Y) dY
    int_inv_y_dx: float        # int (1/Y) dX
    int_x_over_y_dx: float     # int (X/Y) dX
    int_x_dx: float            # int X dX (quadratic-variation identity)
    int_inv_y_ds: float        # int (1/Y) ds
    int_x_over_y_ds: float     # int (X/Y) ds
    int_x2_over_y_ds: float    # int (X^2/Y) ds
    int_y_ds: float            # int Y ds
    int_x_ds: float            # int X ds
    int_x2_ds: float           # int X^2 ds

    def to_json(self) -> dict:
        """Flat JSON object with the thirteen named fields."""
        return asdict(self)

    @classmethod
    def from_json(cls, obj: dict) -> "SufficientStats":
        return cls(**{k: float(obj[k]) for k in cls.__dataclass_fields__})


def stieltjes_sum(integrand, integrator) -> float:
    """Adapted left-endpoint sum  sum_i f[i-1] (g[i] - g[i-1])."""
    f = np.asarray(integrand, dtype=np.float64)
    g = np.asarray(integrator, dtype=np.float64)
    if f.ndim != 1 or f.shape != g.shape:
        raise LengthMismatch(
            f"integrand and integrator must be equal-length 1-D arrays, "
            f"got shapes {f.shape} and {g.shape}"
        )
    return float(np.dot(f[:-1], np.diff(g)))


def time_integral(values, dt: float) -> float:
    """Left rectangle rule  dt * sum values[:-1], consistent with
    `stieltjes_sum` so the discrete Cauchy-Schwarz identities hold exactly."""
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    v = np.asarray(values, dtype=np.float64)
    return float(v[:-1].sum() * dt)


def ito_x_dx(path: SamplePath) -> float:
    """int_0^T X dX via the quadratic-variation identity
    (X_T^2 - X_0^2 - int Y ds)/2; exact only on solution paths, where the
    quadratic variation of X is int Y ds."""
    return float(
        0.5 * (path.x[-1] ** 2 - path.x[0] ** 2 - time_integral(path.y, path.grid.dt))
    )


def _check_positive(y: np.ndarray) -> None:
    if y.min() <= 0.0:
        idx = int(np.argmax(y <= 0.0))
        raise NonpositiveY(idx, float(y[idx]))


def sufficient_stats(path: SamplePath) -> SufficientStats:
    """All thirteen functionals of one path.

    Requires min Y > 0 on the grid, otherwise the 1/Y integrands are
    undefined and NonpositiveY reports the first offending index.
    """
    _check_positive(path.y)
    y, x, dt = path.y, path.x, path.grid.dt
    inv_y = 1.0 / y
    x_over_y = x * inv_y
    return SufficientStats(
        t_end=path.grid.t_end,
        delta_y=float(y[-1] - y[0]),
        delta_x=float(x[-1] - x[0]),
        int_inv_y_dy=stieltjes_sum(inv_y, y),
        int_inv_y_dx=stieltjes_sum(inv_y, x),
        int_x_over_y_dx=stieltjes_sum(x_over_y, x),
        int_x_dx=ito_x_dx(path),
        int_inv_y_ds=time_integral(inv_y, dt),
        int_x_over_y_ds=time_integral(x_over_y, dt),
        int_x2_over_y_ds=time_integral(x * x_over_y, dt),
        int_y_ds=time_integral(y, dt),
        int_x_ds=time_integral(x, dt),
        int_x2_ds=time_integral(x * x, dt),
    )


def sufficient_stats_prefix(path: SamplePath, horizons) -> list[SufficientStats]:
    """Sufficient statistics of the path restricted to [0, T] for each T in
    `horizons` (ascending, on-grid), sharing one pass of cumulative sums.
    """
    y, x, dt = path.y, path.x, path.grid.dt
    horizons = list(horizons)
    if not horizons or any(
        h2 <= h1 for h1, h2 in zip(horizons, horizons[1:])
    ):
        raise ValueError(f"horizons must be nonempty ascending, got {horizons}")
    idx = []
    for t in horizons:
        k = round(t / dt)
        if k < 1 or k > path.grid.n_steps or abs(k * dt - t) > 1e-9 * max(1.0, t):
            raise ValueError(f"horizon {t} is not on the grid (dt={dt})")
        idx.append(k)
    _check_positive(y[: idx[-1] + 1])

    dy = np.diff(y[: idx[-1] + 1])
    dx = np.diff(x[: idx[-1] + 1])
    yl = y[: idx[-1]]
    xl = x[: idx[-1]]
    inv_y = 1.0 / yl
    x_over_y = xl * inv_y
    cums = {
        "int_inv_y_dy": np.cumsum(inv_y * dy),
        "int_inv_y_dx": np.cumsum(inv_y * dx),
        "int_x_over_y_dx": np.cumsum(x_over_y * dx),
        "int_inv_y_ds": np.cumsum(inv_y) * dt,
        "int_x_over_y_ds": np.cumsum(x_over_y) * dt,
        "int_x2_over_y_ds": np.cumsum(xl * x_over_y) * dt,
        "int_y_ds": np.cumsum(yl) * dt,
        "int_x_ds": np.cumsum(xl) * dt,
        "int_x2_ds": np.cumsum(xl * xl) * dt,
    }
    out = []
    for t, k in zip(horizons, idx):
        vals = {name: float(c[k - 1]) for name, c in cums.items()}
        out.append(
            SufficientStats(
                t_end=k * dt,
                delta_y=float(y[k] - y[0]),
                delta_x=float(x[k] - x[0]),
                int_x_dx=float(0.5 * (x[k] ** 2 - x[0] ** 2 - vals["int_y_ds"])),
                **vals,
            )
        )
    return out
