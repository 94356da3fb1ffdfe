import numpy as np
import pytest

from gnk.manifold_bundle import ChartManifold, trivial_bundle


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def square():
    return ChartManifold(2, [(-1.0, 1.0), (-1.0, 1.0)])


@pytest.fixture
def bundle2(square):
    return trivial_bundle(square, 2, half_width=3.0)


@pytest.fixture
def minkowski():
    return np.diag([1.0, -1.0])
