"""Sample paths of (Y, X) on a uniform grid.

Two stepping schemes:

* ``Scheme.EXACT`` — Y moves through its exact conditional law over one
  step (a noncentral chi-square with 4a degrees of freedom, scaled), so
  the Y chain is unbiased in law at any step size and consistent with the
  Gamma(2a, 2b) stationary marginal.  X is conditionally Gaussian given
  the Y path; its integrated-variance term int e^{-2 theta (dt-u)} Y_u du
  is approximated by the trapezoid rule on the two Y endpoints (O(dt^2)
  bias per step, the dominant discretization error of this scheme).
* ``Scheme.EULER`` — full-truncation Euler-Maruyama for both components,
  kept as a fallback and as the workhorse for coupled refinement studies.

Each path owns a counter-based random stream keyed by (seed, stream_id):
the same key reproduces the path bit-exactly, distinct stream_ids are
statistically independent, so replicate-level parallelism is reproducible
regardless of scheduling.  The Y noise and the X noise come from separate
child streams.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from numba import njit

from .errors import InvalidGrid, NegativeY0, NotSubcritical
from .model import Criticality, ModelParams, classify

__all__ = [
    "GridSpec",
    "RngStream",
    "SamplePath",
    "Scheme",
    "simulate",
    "simulate_stationary_start",
    "write_path_csv",
    "read_path_csv",
]


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid on [0, t_end] with n_steps intervals of width dt."""

    t_end: float
    dt: float
    n_steps: int = 0  # derived from t_end/dt when left at 0

    def __post_init__(self):
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise InvalidGrid(f"dt must be a positive real, got {self.dt}")
        if not (math.isfinite(self.t_end) and self.t_end > 0):
            raise InvalidGrid(f"t_end must be a positive real, got {self.t_end}")
        n = self.n_steps if self.n_steps else round(self.t_end / self.dt)
        if n < 1 or abs(n * self.dt - self.t_end) > 1e-9 * max(1.0, abs(self.t_end)):
            raise InvalidGrid(
                f"dt={self.dt} does not tile t_end={self.t_end} "
                f"(n_steps={n}, n_steps*dt={n * self.dt})"
            )
        object.__setattr__(self, "n_steps", int(n))

    def times(self) -> np.ndarray:
        return np.arange(self.n_steps + 1) * self.dt


@dataclass(frozen=True)
class RngStream:
    """Reproducible stream identity (seed, stream_id).

    Streams are realized as Philox counter-based generators derived from
    SeedSequence((seed, stream_id)): the same pair reproduces every draw
    bit-exactly, distinct stream_ids give independent streams.
    """

    seed: int
    stream_id: int = 0

    def __post_init__(self):
        for name in ("seed", "stream_id"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < 0 or v >= 2**64:
                raise ValueError(f"{name} must be an integer in [0, 2^64), got {v!r}")

    def spawn(self, n: int) -> list[np.random.Generator]:
        """The first n child generators of this stream (deterministic)."""
        ss = np.random.SeedSequence(entropy=(int(self.seed), int(self.stream_id)))
        return [np.random.Generator(np.random.Philox(child)) for child in ss.spawn(n)]


@dataclass
class SamplePath:
    """One discretized (Y, X) trajectory; y and x hold n_steps+1 points."""

    grid: GridSpec
    y: np.ndarray
    x: np.ndarray
    seed: RngStream | None = None

    def __post_init__(self):
        self.y = np.ascontiguousarray(self.y, dtype=np.float64)
        self.x = np.ascontiguousarray(self.x, dtype=np.float64)
        n = self.grid.n_steps + 1
        if len(self.y) != n or len(self.x) != n:
            raise InvalidGrid(
                f"path length mismatch: grid wants {n} points, "
                f"got len(y)={len(self.y)}, len(x)={len(self.x)}"
            )
        if self.y.min() < 0:
            raise ValueError("negative values in the y component")


class Scheme(str, Enum):
    EXACT = "exact"   # exact CIR transition for Y, conditionally Gaussian X
    EULER = "euler"   # full-truncation Euler-Maruyama for both components


@njit(cache=True, nogil=True)
def _exact_path(gen_l, gen_b, a, b, m, theta, y0, x0, dt, n):
    y = np.empty(n + 1)
    x = np.empty(n + 1)
    y[0] = y0
    x[0] = x0
    df = 4.0 * a
    if abs(b) < 1e-14:
        c = 2.0 / dt
        ebd = 1.0
    else:
        c = 2.0 * b / (-math.expm1(-b * dt))
        ebd = math.exp(-b * dt)
    two_c = 2.0 * c
    if abs(theta) < 1e-14:
        etd = 1.0
        drift_x = m * dt
        e2 = 1.0
    else:
        etd = math.exp(-theta * dt)
        drift_x = m * (-math.expm1(-theta * dt)) / theta
        e2 = etd * etd
    half_dt = 0.5 * dt
    for i in range(n):
        lam = two_c * ebd * y[i]
        y[i + 1] = gen_l.noncentral_chisquare(df, lam) / two_c
        var = half_dt * (e2 * y[i] + y[i + 1])
        x[i + 1] = etd * x[i] + drift_x + math.sqrt(var) * gen_b.standard_normal()
    return y, x


@njit(cache=True, nogil=True)
def _euler_path(gen_l, gen_b, a, b, m, theta, y0, x0, dt, n):
    y = np.empty(n + 1)
    x = np.empty(n + 1)
    y[0] = y0
    x[0] = x0
    sdt = math.sqrt(dt)
    for i in range(n):
        yp = y[i] if y[i] > 0.0 else 0.0
        vol = math.sqrt(yp) * sdt
        yn = y[i] + (a - b * yp) * dt + vol * gen_l.standard_normal()
        y[i + 1] = yn if yn > 0.0 else 0.0
        x[i + 1] = x[i] + (m - theta * x[i]) * dt + vol * gen_b.standard_normal()
    return y, x


@njit(cache=True, nogil=True)
def _euler_path_increments(a, b, m, theta, y0, x0, dt, dwl, dwb):
    """Full-truncation Euler driven by supplied Brownian increments
    (N(0, dt) each); the hook for coupled step-refinement studies."""
    n = dwl.shape[0]
    y = np.empty(n + 1)
    x = np.empty(n + 1)
    y[0] = y0
    x[0] = x0
    for i in range(n):
        yp = y[i] if y[i] > 0.0 else 0.0
        vol = math.sqrt(yp)
        yn = y[i] + (a - b * yp) * dt + vol * dwl[i]
        y[i + 1] = yn if yn > 0.0 else 0.0
        x[i + 1] = x[i] + (m - theta * x[i]) * dt + vol * dwb[i]
    return y, x


def simulate(
    p: ModelParams,
    y0: float,
    x0: float,
    grid: GridSpec,
    scheme: Scheme = Scheme.EXACT,
    rng: RngStream = RngStream(0),
) -> SamplePath:
    """Simulate one (Y, X) path on `grid` under the given scheme.

    y0 must be nonnegative (strictly positive recommended: the 1/Y path
    functionals need Y > 0 on the grid).  The Y noise and X noise are
    drawn from independent child streams of `rng`.
    """
    if y0 < 0:
        raise NegativeY0(f"y0 must be >= 0, got {y0}")
    if not math.isfinite(x0):
        raise ValueError(f"x0 must be finite, got {x0}")
    scheme = Scheme(scheme)
    gen_l, gen_b = rng.spawn(2)
    step = _exact_path if scheme is Scheme.EXACT else _euler_path
    y, x = step(
        gen_l, gen_b, p.a, p.b, p.m, p.theta,
        float(y0), float(x0), grid.dt, grid.n_steps,
    )
    return SamplePath(grid=grid, y=y, x=x, seed=rng)


def simulate_stationary_start(
    p: ModelParams,
    grid: GridSpec,
    burn_in: float = 0.0,
    scheme: Scheme = Scheme.EXACT,
    rng: RngStream = RngStream(0),
) -> SamplePath:
    """Simulate with y0 drawn from the stationary Gamma(2a, 2b) marginal.

    x0 starts at the stationary mean m/theta and is given `burn_in` time
    units to forget it; the returned path is the post-burn-in segment of
    length grid.t_end.  burn_in must be a multiple of grid.dt.
    """
    if classify(p) is not Criticality.SUBCRITICAL:
        raise NotSubcritical(
            f"stationary start needs b > 0 and theta > 0, got b={p.b}, theta={p.theta}"
        )
    if burn_in < 0:
        raise ValueError(f"burn_in must be >= 0, got {burn_in}")
    k0 = round(burn_in / grid.dt)
    if abs(k0 * grid.dt - burn_in) > 1e-9 * max(1.0, burn_in):
        raise InvalidGrid(f"burn_in={burn_in} is not a multiple of dt={grid.dt}")
    gen_init = rng.spawn(3)[2]
    y0 = gen_init.gamma(2.0 * p.a, 1.0 / (2.0 * p.b))
    x0 = p.m / p.theta
    if k0 == 0:
        return simulate(p, y0, x0, grid, scheme, rng)
    full = GridSpec(t_end=burn_in + grid.t_end, dt=grid.dt)
    path = simulate(p, y0, x0, full, scheme, rng)
    return SamplePath(grid=grid, y=path.y[k0:], x=path.x[k0:], seed=rng)


def write_path_csv(path: SamplePath, dest) -> None:
    """Dump a path as CSV with header t,y,x, 17 significant digits."""
    data = np.column_stack([path.grid.times(), path.y, path.x])
    np.savetxt(dest, data, fmt="%.17g", delimiter=",", header="t,y,x", comments="")


def read_path_csv(src) -> SamplePath:
    """Load a t,y,x CSV produced by `write_path_csv` (uniform grid from 0)."""
    data = np.loadtxt(src, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] != 3 or data.shape[0] < 2:
        raise InvalidGrid("path CSV must have columns t,y,x and at least 2 rows")
    t, y, x = data[:, 0], data[:, 1], data[:, 2]
    n = len(t) - 1
    dt = (t[-1] - t[0]) / n
    if abs(t[0]) > 1e-12 or np.max(np.abs(np.diff(t) - dt)) > 1e-9 * max(1.0, dt):
        raise InvalidGrid("path CSV grid must be uniform and start at t=0")
    grid = GridSpec(t_end=float(t[-1]), dt=float(dt), n_steps=n)
    return SamplePath(grid=grid, y=y, x=x, seed=None)
