"""Shared test utilities: synthetic sufficient statistics, random
subcritical parameter draws, and finite-difference derivatives."""

import numpy as np

from affine2f import ModelParams, SufficientStats, loglik


def random_subcritical(rng, a_min=0.55, a_max=2.5, rate_min=0.5, rate_max=2.0,
                       m_span=1.5):
    return ModelParams(
        a=float(rng.uniform(a_min, a_max)),
        b=float(rng.uniform(rate_min, rate_max)),
        m=float(rng.uniform(-m_span, m_span)),
        theta=float(rng.uniform(rate_min, rate_max)),
    )


def random_pd_stats(rng):
    """SufficientStats with both normal-equation blocks positive definite;
    magnitudes loosely in the range a subcritical path would produce."""
    t = float(rng.uniform(1.0, 50.0))
    u = float(rng.uniform(0.5, 4.0)) * t                    # int (1/Y) ds
    w = t * t / u * float(rng.uniform(1.1, 3.0))            # u * w > T^2
    rx = float(rng.uniform(-1.0, 1.0)) * t                  # int (X/Y) ds
    r2 = rx * rx / u * float(rng.uniform(1.1, 3.0)) + float(rng.uniform(0.1, 2.0)) * t
    sx = float(rng.uniform(-2.0, 2.0)) * t                  # int X ds
    sx2 = sx * sx / t * float(rng.uniform(1.1, 3.0)) + float(rng.uniform(0.1, 2.0)) * t
    return SufficientStats(
        t_end=t,
        delta_y=float(rng.normal(scale=2.0)),
        delta_x=float(rng.normal(scale=2.0)),
        int_inv_y_dy=float(rng.normal(scale=2.0)),
        int_inv_y_dx=float(rng.normal(scale=2.0)),
        int_x_over_y_dx=float(rng.normal(scale=2.0)),
        int_x_dx=float(rng.normal(scale=2.0)),
        int_inv_y_ds=u,
        int_x_over_y_ds=rx,
        int_x2_over_y_ds=r2,
        int_y_ds=w,
        int_x_ds=sx,
        int_x2_ds=sx2,
    )


def loglik_gradient_fd(s, p, step=1e-6):
    """Central-difference gradient in (a, b, m, theta); the likelihood is
    quadratic in the parameters, so this is exact up to rounding."""
    base = np.array([p.a, p.b, p.m, p.theta])
    grad = np.empty(4)
    for i in range(4):
        hi, lo = base.copy(), base.copy()
        hi[i] += step
        lo[i] -= step
        grad[i] = (loglik(s, ModelParams(*hi)) - loglik(s, ModelParams(*lo))) / (2 * step)
    return grad


def loglik_hessian_fd(s, p, step=1e-4):
    base = np.array([p.a, p.b, p.m, p.theta])
    hess = np.empty((4, 4))
    for i in range(4):
        for j in range(4):
            pp = [base.copy() for _ in range(4)]
            pp[0][i] += step; pp[0][j] += step
            pp[1][i] += step; pp[1][j] -= step
            pp[2][i] -= step; pp[2][j] += step
            pp[3][i] -= step; pp[3][j] -= step
            vals = [loglik(s, ModelParams(*q)) for q in pp]
            hess[i, j] = (vals[0] - vals[1] - vals[2] + vals[3]) / (4 * step * step)
    return hess
