import numpy as np
import pytest

from quasilab import weights as W


def smooth_bump(t, center=0.0, radius=1.0):
    x = (np.asarray(t, dtype=float) - center) / radius
    out = np.zeros_like(x)
    inside = np.abs(x) < 1
    out[inside] = np.exp(-1.0 / (1.0 - x[inside] ** 2))
    return out


@pytest.fixture(scope="session")
def example_family():
    return W.shifted_geometric(0.5, 64, 1.0)


@pytest.fixture(scope="session")
def example_weight(example_family):
    return W.build_weight(example_family, 200)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
