import io

import numpy as np
import pytest
from scipy import stats as sstats

from affine2f import (
    GridSpec,
    ModelParams,
    RngStream,
    SamplePath,
    Scheme,
    mean_at,
    read_path_csv,
    simulate,
    simulate_stationary_start,
    write_path_csv,
)
from affine2f.errors import InvalidGrid, NegativeY0, NotSubcritical
from affine2f.simulate import _euler_path_increments


P = ModelParams(1.0, 1.0, 1.0, 1.0)


def test_grid_derives_n_steps():
    g = GridSpec(10.0, 0.01)
    assert g.n_steps == 1000
    assert g.times()[0] == 0.0
    assert g.times()[-1] == pytest.approx(10.0, abs=1e-12)


def test_grid_rejects_nontiling_step():
    with pytest.raises(InvalidGrid):
        GridSpec(1.0, 0.3)
    with pytest.raises(InvalidGrid):
        GridSpec(1.0, -0.1)
    with pytest.raises(InvalidGrid):
        GridSpec(0.0, 0.1)
    with pytest.raises(InvalidGrid):
        GridSpec(1.0, 0.1, n_steps=7)


def test_rng_stream_validation():
    with pytest.raises(ValueError):
        RngStream(-1, 0)
    with pytest.raises(ValueError):
        RngStream(0, 2**64)


@pytest.mark.parametrize("scheme", [Scheme.EXACT, Scheme.EULER])
def test_same_stream_reproduces_bit_exactly(scheme):
    g = GridSpec(2.0, 0.01)
    a = simulate(P, 1.0, 0.0, g, scheme, RngStream(123, 5))
    b = simulate(P, 1.0, 0.0, g, scheme, RngStream(123, 5))
    assert np.array_equal(a.y, b.y) and np.array_equal(a.x, b.x)
    c = simulate(P, 1.0, 0.0, g, scheme, RngStream(123, 6))
    assert not np.array_equal(a.y, c.y)


def test_negative_y0_rejected():
    with pytest.raises(NegativeY0):
        simulate(P, -0.1, 0.0, GridSpec(1.0, 0.1), rng=RngStream(0))


@pytest.mark.parametrize("scheme", [Scheme.EXACT, Scheme.EULER])
def test_y_stays_nonnegative(scheme):
    # low a pushes the Euler chain into the truncation region
    p = ModelParams(0.3, 1.0, 0.0, 1.0)
    path = simulate(p, 0.05, 0.0, GridSpec(20.0, 0.02), scheme, RngStream(3, 0))
    assert path.y.min() >= 0.0


@pytest.mark.parametrize("scheme", [Scheme.EXACT, Scheme.EULER])
def test_long_run_y_mean(scheme):
    # ergodic level a/b = 1; average the second half of a long path
    path = simulate(P, 1.0, 0.0, GridSpec(2000.0, 0.01), scheme, RngStream(17, 0))
    tail = path.y[len(path.y) // 2 :]
    assert tail.mean() == pytest.approx(1.0, abs=0.1)


def test_mean_curve_matches_exact_first_moments():
    # N=2000 replicates; sample mean of (Y_t, X_t) within 4 standard errors
    n_rep = 2000
    g = GridSpec(5.0, 0.01)
    checkpoints = [50, 100, 200, 500]  # t = 0.5, 1, 2, 5
    ys = np.empty((n_rep, len(checkpoints)))
    xs = np.empty((n_rep, len(checkpoints)))
    for i in range(n_rep):
        path = simulate(P, 1.0, 0.0, g, Scheme.EXACT, RngStream(90, i))
        ys[i] = path.y[checkpoints]
        xs[i] = path.x[checkpoints]
    for j, k in enumerate(checkpoints):
        ey, ex = mean_at(P, 1.0, 0.0, k * g.dt)
        for sample, target in ((ys[:, j], ey), (xs[:, j], ex)):
            se = sample.std(ddof=1) / np.sqrt(n_rep)
            assert abs(sample.mean() - target) < 4 * se


def test_y_noise_and_x_noise_uncorrelated():
    # with m = 0, x0 = 0: corr(Y_T, X_T) across replicates ~ 0 within 4/sqrt(N)
    p = ModelParams(1.0, 1.0, 0.0, 1.0)
    n_rep = 2000
    g = GridSpec(2.0, 0.01)
    end = np.array(
        [
            (lambda q: (q.y[-1], q.x[-1]))(simulate(p, 1.0, 0.0, g, Scheme.EXACT, RngStream(91, i)))
            for i in range(n_rep)
        ]
    )
    corr = np.corrcoef(end[:, 0], end[:, 1])[0, 1]
    assert abs(corr) < 4.0 / np.sqrt(n_rep)


def test_euler_coupled_refinement_strong_error_decreases():
    # one Brownian path at the finest level, aggregated to coarser steps;
    # endpoint RMS distance to the fine reference must shrink with dt
    rng = np.random.default_rng(5)
    t_end, dt = 2.0, 0.05
    n_fine = round(t_end / (dt / 8))
    err_c, err_m = [], []
    for _ in range(300):
        dwl = rng.normal(scale=np.sqrt(dt / 8), size=n_fine)
        dwb = rng.normal(scale=np.sqrt(dt / 8), size=n_fine)
        ref_y, ref_x = _euler_path_increments(1.0, 1.0, 1.0, 1.0, 1.0, 0.0, dt / 8, dwl, dwb)
        agg = lambda w, k: w.reshape(-1, k).sum(axis=1)
        y_c, x_c = _euler_path_increments(1.0, 1.0, 1.0, 1.0, 1.0, 0.0, dt, agg(dwl, 8), agg(dwb, 8))
        y_m, x_m = _euler_path_increments(1.0, 1.0, 1.0, 1.0, 1.0, 0.0, dt / 2, agg(dwl, 4), agg(dwb, 4))
        err_c.append((y_c[-1] - ref_y[-1]) ** 2 + (x_c[-1] - ref_x[-1]) ** 2)
        err_m.append((y_m[-1] - ref_y[-1]) ** 2 + (x_m[-1] - ref_x[-1]) ** 2)
    assert np.sqrt(np.mean(err_m)) < np.sqrt(np.mean(err_c))


def test_stationary_start_y0_gamma_moments():
    # y[0] ~ Gamma(2a, 2b) = Gamma(2, 2): mean 1, variance 1/2
    g = GridSpec(0.5, 0.1)
    y0 = np.array(
        [simulate_stationary_start(P, g, rng=RngStream(92, i)).y[0] for i in range(10_000)]
    )
    assert y0.mean() == pytest.approx(1.0, abs=0.03)
    assert y0.var(ddof=1) == pytest.approx(0.5, abs=0.05)


def test_stationary_start_marginal_invariant_under_flow():
    # start and end marginals of Y agree (two-sample KS at alpha=0.01)
    g = GridSpec(1.0, 0.1)
    y0s = np.empty(10_000)
    yts = np.empty(10_000)
    for i in range(10_000):
        path = simulate_stationary_start(P, g, rng=RngStream(93, i))
        y0s[i], yts[i] = path.y[0], path.y[-1]
    assert sstats.ks_2samp(y0s, yts).pvalue > 0.01


def test_stationary_start_gamma_moments_at_every_grid_time():
    n_rep = 2000
    g = GridSpec(1.0, 0.1)
    ys = np.empty((n_rep, g.n_steps + 1))
    for i in range(n_rep):
        ys[i] = simulate_stationary_start(P, g, rng=RngStream(94, i)).y
    se_mean = np.sqrt(0.5 / n_rep)
    se_var = np.sqrt(1.25 / n_rep)  # Var of Gamma(2,2) variance estimate
    for k in range(g.n_steps + 1):
        assert abs(ys[:, k].mean() - 1.0) < 4 * se_mean
        assert abs(ys[:, k].var(ddof=1) - 0.5) < 4 * se_var


def test_stationary_start_x_mean_zero_when_m_zero():
    p = ModelParams(1.0, 1.0, 0.0, 1.0)
    path = simulate_stationary_start(p, GridSpec(500.0, 0.01), burn_in=0.0,
                                     rng=RngStream(95, 0))
    x = path.x[:-1]
    batches = x[: 50 * (len(x) // 50)].reshape(50, -1).mean(axis=1)
    se = batches.std(ddof=1) / np.sqrt(len(batches))
    assert abs(x.mean()) < 3 * se


def test_stationary_start_needs_subcritical():
    with pytest.raises(NotSubcritical):
        simulate_stationary_start(ModelParams(1.0, 0.0, 0.0, 1.0), GridSpec(1.0, 0.1))


def test_stationary_start_burn_in_slicing():
    g = GridSpec(2.0, 0.1)
    path = simulate_stationary_start(P, g, burn_in=1.0, rng=RngStream(96, 0))
    assert len(path.y) == g.n_steps + 1
    again = simulate_stationary_start(P, g, burn_in=1.0, rng=RngStream(96, 0))
    assert np.array_equal(path.y, again.y) and np.array_equal(path.x, again.x)
    with pytest.raises(InvalidGrid):
        simulate_stationary_start(P, g, burn_in=0.55, rng=RngStream(96, 0))


def test_csv_round_trip():
    path = simulate(P, 1.0, 0.0, GridSpec(1.0, 0.01), rng=RngStream(8, 0))
    buf = io.StringIO()
    write_path_csv(path, buf)
    text = buf.getvalue()
    assert text.splitlines()[0] == "t,y,x"
    back = read_path_csv(io.StringIO(text))
    assert back.grid.n_steps == path.grid.n_steps
    assert np.array_equal(back.y, path.y)  # %.17g round-trips float64
    assert np.array_equal(back.x, path.x)


def test_csv_rejects_nonuniform_grid():
    bad = "t,y,x\n0,1,0\n0.1,1,0\n0.35,1,0\n"
    with pytest.raises(InvalidGrid):
        read_path_csv(io.StringIO(bad))


def test_sample_path_validation():
    g = GridSpec(1.0, 0.5)
    with pytest.raises(InvalidGrid):
        SamplePath(g, np.ones(2), np.zeros(3))
    with pytest.raises(ValueError):
        SamplePath(g, np.array([1.0, -0.1, 1.0]), np.zeros(3))
