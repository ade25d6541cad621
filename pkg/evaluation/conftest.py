"""
Shared fixtures for the Transit test suite.

Every random instance is seeded and hypothesis runs derandomized; the
same test draws the same points, sites and endpoints on every run.
Strategies for generated inputs live in evaluation/strategies.py.
"""

import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

# Setup paths
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from Transit.Config import TransitConfig
from Transit.Core import Clustering, DataSet, SiteVector
from Transit.IO_Layer import Instance, generate_instance

# Hypothesis profile for the whole suite
settings.register_profile(
    "transit",
    deadline=None,
    max_examples=30,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
settings.load_profile("transit")


@pytest.fixture
def config() -> TransitConfig:
    """Built-in defaults, independent of TRANSIT_* variables in the environment."""
    return TransitConfig()


@pytest.fixture
def bland_config() -> TransitConfig:
    return TransitConfig(pivot_rule="bland")


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240607)


@pytest.fixture
def two_points() -> DataSet:
    """(-1, 0) and (1, 0)."""
    return DataSet(np.array([[-1.0, 0.0], [1.0, 0.0]]))


@pytest.fixture
def two_sites() -> SiteVector:
    return SiteVector(np.array([[-1.0, 0.0], [1.0, 0.0]]))


@pytest.fixture
def line_instance() -> Instance:
    """
    Six points on the x-axis, two clusters, sites that swap sides between
    s and t. Endpoints are the obvious nearest-site splits of shape (3, 3).
    """
    ds = DataSet(np.array([[x, 0.1 * x * x] for x in (-2.5, -1.5, -0.5, 0.5, 1.5, 2.5)]))
    s = SiteVector(np.array([[-2.0, 0.0], [2.0, 0.3]]))
    t = SiteVector(np.array([[2.0, 0.2], [-2.0, 0.0]]))
    initial = Clustering((0, 0, 0, 1, 1, 1), 2)
    target = Clustering((1, 1, 1, 0, 0, 0), 2)
    return Instance(dataset=ds, initial=initial, target=target, s=s, t=t)


def make_instance(n: int, k: int, d: int, seed: int, config: TransitConfig = None) -> Instance:
    """Random instance with LSA endpoints for random shapes (same family as `main.py generate`)."""
    return generate_instance(n, k, d, seed=seed, config=config or TransitConfig())


@pytest.fixture
def small_instance(config) -> Instance:
    return make_instance(8, 3, 2, seed=11, config=config)
