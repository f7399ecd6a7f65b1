import pytest

from affine2f import ModelParams, RngStream, moments_by_simulation


@pytest.fixture(scope="session")
def p1111():
    return ModelParams(1.0, 1.0, 1.0, 1.0)


@pytest.fixture(scope="session")
def mom_1111(p1111):
    # One long ergodic run (T=1e4) shared by moment, normality and
    # acceptance tests; the only source for E(X/Y) and E(X^2/Y) here.
    return moments_by_simulation(
        p1111, t_total=1e4, dt=1e-2, burn_in=50.0, rng=RngStream(21, 0)
    )
