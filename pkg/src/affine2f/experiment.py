"""Monte Carlo experiment harness.

Two experiment kinds over a ladder of observation horizons: consistency
runs track bias and RMSE of each estimator as the horizon grows, and
normality runs compare the empirical covariance of sqrt(T)-scaled errors
against the asymptotic covariances, with distribution diagnostics per
coordinate.

Replicate r of a run always simulates with stream (seed, r), so a report
is reproducible byte-for-byte (modulo its timestamp) no matter how the
replicates are scheduled; setting the env var AFFINE2F_THREADS > 1 runs
them on a thread pool and changes wall time only.  Degenerate-denominator
events are counted per (estimator, horizon), never silently dropped: the
theory predicts a count of zero, so any positive count is itself a red
flag surfaced in the report.
"""

from __future__ import annotations

import hashlib
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np
from scipy import stats as sstats

from . import __version__
from .asymptotics import (
    hybrid_moments,
    moments_by_simulation,
    sigma_lse,
    sigma_mle,
    theta_lse_variance_known_m,
    theta_mle_variance_known_m,
)
from .errors import DegenerateDenominator, NonpositiveY
from .estimators import (
    lse_discrete,
    lse_full,
    lse_theta_known_m,
    mle_full,
    mle_theta_known_m,
)
from .model import ModelParams, StationaryMoments
from .pathstats import sufficient_stats_prefix
from .simulate import GridSpec, RngStream, Scheme, simulate, simulate_stationary_start

__all__ = [
    "ESTIMATOR_NAMES",
    "ExperimentConfig",
    "ExperimentReport",
    "run_consistency",
    "run_normality",
]

ESTIMATOR_NAMES = ("mle_theta", "mle_full", "lse_theta", "lse_full", "lse_discrete")

# Default acceptance tolerances for normality verdicts: covariance entries
# within this fraction of the largest theoretical diagonal entry, and the
# KS statistic of each standardized coordinate below 1.63/sqrt(N)
# (asymptotic alpha ~ 0.01).
COV_REL_TOL = 0.20
KS_COEFF = 1.63


@dataclass(frozen=True)
class ExperimentConfig:
    """Configuration of one Monte Carlo run.

    m_known is required by the known-m estimators (mle_theta, lse_theta)
    and, when given, switches lse_discrete to its known-m variant.
    lse_discrete observes X at unit-spaced times, so it requires integer
    horizons and a dt that tiles the unit interval.
    """

    params: ModelParams
    horizons: tuple[float, ...]
    dt: float
    n_replicates: int
    seed: int
    estimators: tuple[str, ...] = ESTIMATOR_NAMES
    m_known: float | None = None
    y0: float = 1.0
    x0: float = 0.0
    stationary_start: bool = False
    burn_in: float = 0.0
    scheme: Scheme = Scheme.EXACT

    def __post_init__(self):
        object.__setattr__(self, "horizons", tuple(float(t) for t in self.horizons))
        object.__setattr__(self, "estimators", tuple(self.estimators))
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        if self.n_replicates < 1:
            raise ValueError(f"n_replicates must be >= 1, got {self.n_replicates}")
        if self.dt <= 0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if not self.horizons or any(
            t2 <= t1 for t1, t2 in zip(self.horizons, self.horizons[1:])
        ) or self.horizons[0] <= 0:
            raise ValueError(f"horizons must be ascending positive, got {self.horizons}")
        unknown = set(self.estimators) - set(ESTIMATOR_NAMES)
        if unknown:
            raise ValueError(f"unknown estimators {sorted(unknown)}")
        if self.m_known is None and (
            "mle_theta" in self.estimators or "lse_theta" in self.estimators
        ):
            raise ValueError("mle_theta and lse_theta require m_known")
        if "lse_discrete" in self.estimators:
            stride = round(1.0 / self.dt)
            if abs(stride * self.dt - 1.0) > 1e-9:
                raise ValueError(
                    f"lse_discrete needs dt to tile the unit interval, got dt={self.dt}"
                )
            if any(abs(t - round(t)) > 1e-9 for t in self.horizons):
                raise ValueError(
                    f"lse_discrete needs integer horizons, got {self.horizons}"
                )

    def coords(self, estimator: str) -> tuple[str, ...]:
        if estimator == "mle_full":
            return ("a", "b", "m", "theta")
        if estimator == "lse_full":
            return ("m", "theta")
        if estimator == "lse_discrete" and self.m_known is None:
            return ("m", "theta")
        return ("theta",)

    def truth(self, estimator: str) -> np.ndarray:
        p = self.params
        by_name = {"a": p.a, "b": p.b, "m": p.m, "theta": p.theta}
        return np.array([by_name[c] for c in self.coords(estimator)])

    def to_json(self) -> dict:
        return {
            "params": {
                "a": self.params.a, "b": self.params.b,
                "m": self.params.m, "theta": self.params.theta,
            },
            "horizons": list(self.horizons),
            "dt": self.dt,
            "n_replicates": self.n_replicates,
            "seed": self.seed,
            "estimators": list(self.estimators),
            "m_known": self.m_known,
            "y0": self.y0,
            "x0": self.x0,
            "stationary_start": self.stationary_start,
            "burn_in": self.burn_in,
            "scheme": self.scheme.value,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ExperimentConfig":
        params = ModelParams(
            **{k: float(obj["params"][k]) for k in ("a", "b", "m", "theta")}
        )
        kwargs = {
            k: obj[k]
            for k in (
                "m_known", "y0", "x0", "stationary_start", "burn_in", "scheme",
            )
            if k in obj
        }
        return cls(
            params=params,
            horizons=tuple(obj["horizons"]),
            dt=float(obj["dt"]),
            n_replicates=int(obj["n_replicates"]),
            seed=int(obj["seed"]),
            estimators=tuple(obj.get("estimators", ESTIMATOR_NAMES)),
            **kwargs,
        )

    def config_hash(self) -> str:
        canon = json.dumps(self.to_json(), sort_keys=True)
        return hashlib.sha256(canon.encode()).hexdigest()


@dataclass
class ExperimentReport:
    """Aggregated Monte Carlo results: one block per (estimator, horizon),
    verdict summaries per estimator, and enough metadata (config hash,
    per-replicate stream ids, package version) to replay any replicate."""

    mode: str
    config: ExperimentConfig
    blocks: list[dict]
    verdicts: dict
    stream_ids: list[int]
    timestamp: str
    version: str = __version__

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "config": self.config.to_json(),
            "config_hash": self.config.config_hash(),
            "version": self.version,
            "timestamp": self.timestamp,
            "seed": self.config.seed,
            "stream_ids": self.stream_ids,
            "blocks": self.blocks,
            "verdicts": self.verdicts,
        }

    def to_json_str(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=1)

    def save(self, dest) -> None:
        if hasattr(dest, "write"):
            dest.write(self.to_json_str())
        else:
            with open(dest, "w") as fh:
                fh.write(self.to_json_str())

    def block(self, estimator: str, horizon: float) -> dict:
        for blk in self.blocks:
            if blk["estimator"] == estimator and blk["horizon"] == horizon:
                return blk
        raise KeyError(f"no block for ({estimator}, {horizon})")


def _estimate_vector(cfg, estimator, stats, x_unit, horizon):
    if estimator == "mle_theta":
        return np.array([mle_theta_known_m(stats, cfg.m_known)])
    if estimator == "mle_full":
        r = mle_full(stats)
        return np.array([r.a_hat, r.b_hat, r.m_hat, r.theta_hat])
    if estimator == "lse_theta":
        return np.array([lse_theta_known_m(stats, cfg.m_known)])
    if estimator == "lse_full":
        r = lse_full(stats)
        return np.array([r.m_hat, r.theta_hat])
    # lse_discrete on the unit-time observations up to this horizon
    m_hat, theta_hat = lse_discrete(x_unit[: round(horizon) + 1], cfg.m_known)
    if cfg.m_known is None:
        return np.array([m_hat, theta_hat])
    return np.array([theta_hat])


def _replicate_estimates(cfg: ExperimentConfig, stream_id: int) -> dict:
    """Estimates of one replicate, keyed (estimator, horizon); None marks a
    degenerate-denominator or nonpositive-Y event."""
    rng = RngStream(cfg.seed, stream_id)
    grid = GridSpec(t_end=cfg.horizons[-1], dt=cfg.dt)
    if cfg.stationary_start:
        path = simulate_stationary_start(cfg.params, grid, cfg.burn_in, cfg.scheme, rng)
    else:
        path = simulate(cfg.params, cfg.y0, cfg.x0, grid, cfg.scheme, rng)
    keys = [(est, t) for est in cfg.estimators for t in cfg.horizons]
    try:
        stats_list = sufficient_stats_prefix(path, cfg.horizons)
    except NonpositiveY:
        return {key: None for key in keys}
    x_unit = None
    if "lse_discrete" in cfg.estimators:
        x_unit = path.x[:: round(1.0 / cfg.dt)]
    out = {}
    for horizon, stats in zip(cfg.horizons, stats_list):
        for est in cfg.estimators:
            try:
                out[(est, horizon)] = _estimate_vector(cfg, est, stats, x_unit, horizon)
            except DegenerateDenominator:
                out[(est, horizon)] = None
    return out


def _collect(cfg: ExperimentConfig, stream_ids) -> list[dict]:
    n_threads = int(os.environ.get("AFFINE2F_THREADS", "1"))
    if n_threads > 1:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            return list(pool.map(lambda s: _replicate_estimates(cfg, s), stream_ids))
    return [_replicate_estimates(cfg, s) for s in stream_ids]


def _theory_cov(cfg, estimator, moments: StationaryMoments | None):
    if moments is None:
        return None
    if estimator == "mle_theta":
        return np.array([[theta_mle_variance_known_m(moments)]])
    if estimator == "mle_full":
        return sigma_mle(moments).sigma
    if estimator == "lse_theta":
        return np.array([[theta_lse_variance_known_m(moments)]])
    if estimator == "lse_full":
        return sigma_lse(moments).sigma
    return None  # lse_discrete: no continuous-observation theory applies


def _block(cfg, estimator, horizon, results, moments):
    coords = cfg.coords(estimator)
    truth = cfg.truth(estimator)
    rows = [r[(estimator, horizon)] for r in results]
    valid = np.array([row for row in rows if row is not None])
    degenerate = sum(row is None for row in rows)
    n_valid = len(valid)
    blk = {
        "estimator": estimator,
        "horizon": horizon,
        "coords": list(coords),
        "truth": truth.tolist(),
        "n_valid": n_valid,
        "degenerate_count": degenerate,
        "estimates": valid.tolist(),
    }
    if n_valid < 3:
        return blk
    err = valid - truth
    mean = valid.mean(axis=0)
    blk["mean"] = mean.tolist()
    blk["bias"] = (mean - truth).tolist()
    blk["rmse"] = np.sqrt((err**2).mean(axis=0)).tolist()
    blk["stderr_mean"] = (valid.std(axis=0, ddof=1) / np.sqrt(n_valid)).tolist()
    scaled = np.sqrt(horizon) * err
    emp = np.cov(scaled, rowvar=False).reshape(len(coords), len(coords))
    blk["emp_cov_scaled"] = emp.tolist()
    ks, skew, kurt = [], [], []
    for j in range(len(coords)):
        z = scaled[:, j]
        sd = z.std(ddof=1)
        ks.append(
            float(sstats.kstest((z - z.mean()) / sd, "norm").statistic)
            if sd > 0 and n_valid >= 5
            else None
        )
        skew.append(float(sstats.skew(z)))
        kurt.append(float(sstats.kurtosis(z)))
    blk["ks"] = ks
    blk["skewness"] = skew
    blk["excess_kurtosis"] = kurt
    theory = _theory_cov(cfg, estimator, moments)
    if theory is not None:
        blk["theory_cov"] = theory.tolist()
    return blk


def _make_report(cfg, mode, results, moments) -> ExperimentReport:
    blocks = [
        _block(cfg, est, t, results, moments)
        for est in cfg.estimators
        for t in cfg.horizons
    ]
    return ExperimentReport(
        mode=mode,
        config=cfg,
        blocks=blocks,
        verdicts={},
        stream_ids=list(range(cfg.n_replicates)),
        timestamp=datetime.now(timezone.utc).isoformat(),
    )


def run_consistency(cfg: ExperimentConfig) -> ExperimentReport:
    """Bias/RMSE ladder across the horizon list.

    Replicate r simulates one path of length max(horizons) with stream
    (seed, r) and evaluates every estimator on each prefix [0, T]; nesting
    the horizons on a common path is exactly the growing-observation
    regime the consistency statements describe, and it pairs the errors
    across T, sharpening the RMSE comparison.  Verdict per estimator:
    PASS iff every coordinate's RMSE strictly decreases along the ladder
    and the final bias is within 3 standard errors of 0.
    """
    results = _collect(cfg, range(cfg.n_replicates))
    report = _make_report(cfg, "consistency", results, moments=None)
    for est in cfg.estimators:
        coords = cfg.coords(est)
        rmse = np.array(
            [report.block(est, t).get("rmse", [np.nan] * len(coords))
             for t in cfg.horizons]
        )
        decreasing = {
            c: bool(np.all(np.diff(rmse[:, j]) < 0)) for j, c in enumerate(coords)
        }
        final = report.block(est, cfg.horizons[-1])
        bias_ok = {
            c: bool(
                abs(final["bias"][j]) <= 3.0 * final["stderr_mean"][j]
            )
            for j, c in enumerate(coords)
        } if "bias" in final else {c: False for c in coords}
        ok = all(decreasing.values()) and all(bias_ok.values())
        report.verdicts[est] = {
            "rmse_decreasing": decreasing,
            "final_bias_within_3se": bias_ok,
            "degenerate_total": int(
                sum(report.block(est, t)["degenerate_count"] for t in cfg.horizons)
            ),
            "verdict": "PASS" if ok else "FAIL",
        }
    return report


def run_normality(
    cfg: ExperimentConfig,
    moments: StationaryMoments | None = None,
    moments_t_total: float = 5000.0,
    moments_burn_in: float = 50.0,
) -> ExperimentReport:
    """Covariance and distribution check of sqrt(T)-scaled errors.

    `moments` must contain the two simulated ratio moments for the
    likelihood covariances; when omitted, they are estimated here by a
    long-run time average on a dedicated stream (seed, 2^32).  Verdict per
    (estimator, horizon): PASS iff every entry of the empirical scaled
    covariance is within COV_REL_TOL of the largest theoretical diagonal
    entry and every coordinate's KS statistic is below
    KS_COEFF/sqrt(n_valid); estimators without a theoretical covariance
    get the KS check only.
    """
    if moments is None:
        sim = moments_by_simulation(
            cfg.params,
            t_total=moments_t_total,
            dt=cfg.dt,
            burn_in=moments_burn_in,
            rng=RngStream(cfg.seed, 2**32),
        )
        moments = hybrid_moments(cfg.params, sim)
    results = _collect(cfg, range(cfg.n_replicates))
    report = _make_report(cfg, "normality", results, moments=moments)
    for blk in report.blocks:
        key = f"{blk['estimator']}@T={blk['horizon']:g}"
        if "emp_cov_scaled" not in blk:
            report.verdicts[key] = {"verdict": "FAIL", "reason": "no valid replicates"}
            continue
        ks_bound = float(KS_COEFF / np.sqrt(blk["n_valid"]))
        ks_ok = all(k is not None and k < ks_bound for k in blk["ks"])
        entry = {"ks_bound": ks_bound, "ks_ok": ks_ok}
        if "theory_cov" in blk:
            emp = np.array(blk["emp_cov_scaled"])
            theory = np.array(blk["theory_cov"])
            tol = float(COV_REL_TOL * np.max(np.diag(theory)))
            cov_ok = bool(np.max(np.abs(emp - theory)) <= tol)
            entry["cov_tol"] = tol
            entry["cov_max_abs_err"] = float(np.max(np.abs(emp - theory)))
            entry["cov_ok"] = cov_ok
            entry["verdict"] = "PASS" if (cov_ok and ks_ok) else "FAIL"
        else:
            entry["verdict"] = "PASS" if ks_ok else "FAIL"
        report.verdicts[key] = entry
    return report
