import numpy as np
import pytest

from wormszego.experiments import project_counterexample
from wormszego.geometry import make_params
from wormszego.transforms import Grid2D


@pytest.fixture(scope="session")
def params_2pi():
    return make_params(2.0 * np.pi)


@pytest.fixture(scope="session")
def params_3pi2():
    return make_params(1.5 * np.pi)


@pytest.fixture(scope="session")
def small_grid():
    return Grid2D.make(-30.0, 30.0, 2 ** 12, 8)


@pytest.fixture(scope="session")
def op_grid():
    """Generic operator grid: same span as the default, reduced n for speed."""
    return Grid2D.make(-30.0, 30.0, 2 ** 14, 16)


@pytest.fixture(scope="session")
def projection_2pi(params_2pi):
    return project_counterexample(params_2pi)


@pytest.fixture(scope="session")
def projection_3pi2(params_3pi2):
    return project_counterexample(params_3pi2)
