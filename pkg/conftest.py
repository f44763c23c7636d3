import numpy as np
import pytest

from sigmafitz.engine import SolverConfig, WindowConfig
from sigmafitz.operators import FiniteGraph
from sigmafitz.utils.config import get_config


@pytest.fixture
def cfg():
    return get_config()


@pytest.fixture
def window_cfg(cfg):
    return WindowConfig.from_config(cfg)


@pytest.fixture
def solver_cfg(cfg):
    return SolverConfig.from_config(cfg)


@pytest.fixture
def rng():
    return np.random.default_rng(0)


def _triangular_graph(lo=-3.0, hi=3.0, step=0.01):
    k = int(round((hi - lo) / step))
    # integer grid divided once keeps 0 and the kinks exact
    xs = np.arange(int(round(lo / step)), int(round(lo / step)) + k + 1) / int(round(1 / step))
    return FiniteGraph(xs[:, None], np.maximum(1.0 - np.abs(xs), 0.0)[:, None])


def _identity_graph(ks, scale=10):
    xs = np.asarray(ks, dtype=float)[:, None] / scale
    return FiniteGraph(xs, xs)


@pytest.fixture
def tri_graph():
    return _triangular_graph()


@pytest.fixture
def make_triangular_graph():
    return _triangular_graph


@pytest.fixture
def make_identity_graph():
    return _identity_graph
