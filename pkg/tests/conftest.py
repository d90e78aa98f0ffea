"""Shared graphs and estimator settings of the im-lab tests."""

import pytest

from imlab.submodules.graph_core import make_graph
from imlab.submodules.helper_general import set_quiet
from imlab.submodules.spread import EXACT, MONTE_CARLO, EstimatorConfig


@pytest.fixture(autouse=True)
def quiet_status_lines():
    set_quiet(True)
    yield
    set_quiet(False)


@pytest.fixture
def exact_cfg():
    return EstimatorConfig(mode=EXACT)


@pytest.fixture
def mc_cfg():
    return EstimatorConfig(mode=MONTE_CARLO, replicates=20000, base_seed=12345)


@pytest.fixture
def two_node():
    """u -> v with p = 0.5."""
    return make_graph(2, [(0, 1, 0.5)])


@pytest.fixture
def two_node_plus_isolated():
    """u -> v with p = 0.5 and an isolated node z."""
    return make_graph(3, [(0, 1, 0.5)])


@pytest.fixture
def path3():
    return make_graph(3, [(0, 1, 1.0), (1, 2, 1.0)])


@pytest.fixture
def star():
    """Center 0 -> {1, 2, 3} with p = 0.5; node 2 weighs 5."""
    return make_graph(4, [(0, 1, 0.5), (0, 2, 0.5), (0, 3, 0.5)], [1, 1, 5, 1])


@pytest.fixture
def diamond():
    """0 -> {1, 2} -> 3, every edge with p = 0.5."""
    return make_graph(4, [(0, 1, 0.5), (0, 2, 0.5), (1, 3, 0.5), (2, 3, 0.5)])
