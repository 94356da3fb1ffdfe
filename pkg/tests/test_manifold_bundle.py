"""Chart manifolds, bundle charts, projections and strict bundle maps."""

import numpy as np
import pytest

from gnk.errors import CompositionError, OutOfDomainError
from gnk.manifold_bundle import (BundleChart, BundleMap, ChartManifold,
                                 project, trivial_bundle,
                                 vertical_projector)
from gnk.smooth import SmoothMap


class TestChartManifold:
    def test_contains(self, square):
        assert square.contains([0.0, 0.5])
        assert square.contains([1.0, -1.0])
        assert not square.contains([1.2, 0.0])

    def test_bad_box(self):
        with pytest.raises(CompositionError):
            ChartManifold(2, [(-1.0, 1.0)])
        with pytest.raises(CompositionError):
            ChartManifold(1, [(1.0, -1.0)])


class TestBundleChart:
    def test_layout(self, bundle2):
        assert bundle2.total_dim == 4
        assert bundle2.total_box.shape == (4, 2)
        assert np.allclose(bundle2.total_box[2:], [[-3.0, 3.0]] * 2)

    def test_split_and_project(self, bundle2):
        e = np.array([0.1, -0.2, 1.5, -2.5])
        x, y = bundle2.split(e)
        assert np.allclose(x, [0.1, -0.2]) and np.allclose(y, [1.5, -2.5])
        assert np.allclose(project(bundle2, e), x)
        assert np.allclose(bundle2.projection.eval(e), x)

    def test_project_out_of_chart(self, bundle2):
        with pytest.raises(OutOfDomainError):
            project(bundle2, [0.0, 0.0, 4.0, 0.0])

    def test_vertical_projector_idempotent(self, bundle2):
        pv = vertical_projector(bundle2)
        assert np.allclose(pv @ pv, pv)
        v = np.array([1.0, 2.0, 3.0, 4.0])
        assert np.allclose(pv @ v, [0.0, 0.0, 3.0, 4.0])

    def test_bad_fiber_box(self, square):
        with pytest.raises(CompositionError):
            BundleChart(square, 2, [(-1.0, 1.0)])


class TestBundleMap:
    def test_base_passes_through(self, square, bundle2):
        fm = SmoothMap(4, 2, lambda e: [e[2] + e[0], 2.0 * e[3]])
        f = BundleMap(bundle2, bundle2, fm, name="shear")
        out = f([0.5, -0.5, 1.0, 2.0])
        assert np.allclose(out, [0.5, -0.5, 1.5, 4.0])

    def test_base_mismatch(self, square, bundle2):
        line = ChartManifold(1, [(-1.0, 1.0)])
        other = trivial_bundle(line, 2)
        fm = SmoothMap(4, 2, lambda e: [e[2], e[3]])
        with pytest.raises(CompositionError):
            BundleMap(bundle2, other, fm)
