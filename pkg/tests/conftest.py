import warnings

import numpy as np
import pytest

from skewcarleson.errors import BoundaryGrowthWarning
from skewcarleson.quadrature import disk_rule


@pytest.fixture(scope="session")
def rule():
    return disk_rule()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def quiet():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BoundaryGrowthWarning)
        yield
