import numpy as np
import pytest

import rodlqr

BETA = 1.0
N_MODES = 11
GRID = 10


@pytest.fixture(scope="session")
def basis11():
    return rodlqr.build_basis(BETA, N_MODES)


@pytest.fixture(scope="session")
def weights11(basis11):
    return rodlqr.default_weights(basis11)


@pytest.fixture(scope="session")
def riccati11(basis11, weights11):
    sol = rodlqr.riccati_iterate(basis11, weights11)
    assert sol.converged
    return sol


@pytest.fixture(scope="session")
def cubic11(riccati11, basis11, weights11):
    return rodlqr.solve_cubic_tensor(riccati11, basis11, weights11, alpha=1.0)


@pytest.fixture(scope="session")
def model10():
    return rodlqr.build_discrete(GRID, beta=BETA, alpha=1.0)


@pytest.fixture(scope="session")
def lqr10(model10):
    return rodlqr.solve_discrete_lqr(model10)


@pytest.fixture(scope="session")
def albrekht10(model10, lqr10):
    return rodlqr.albrekht_expand(model10, lqr10, degree=3)


@pytest.fixture(scope="session")
def laws10(model10, lqr10, albrekht10):
    _, cubic_law = albrekht10
    return {
        "open": rodlqr.FeedbackLaw.open_loop(model10.n_states),
        "linear": rodlqr.FeedbackLaw(degree=1, k1=lqr10.k1),
        "cubic": cubic_law,
    }


@pytest.fixture(scope="session")
def sim_cfg():
    return rodlqr.SimConfig()


def simpson_integral(f, a, b, panels=10000):
    """Composite Simpson quadrature oracle (independent of the closed forms)."""
    xs = np.linspace(a, b, 2 * panels + 1)
    ys = f(xs)
    h = (b - a) / (2 * panels)
    return h / 3.0 * (ys[0] + ys[-1] + 4 * ys[1:-1:2].sum() + 2 * ys[2:-1:2].sum())
