"""Single-chart manifolds and fiber bundles.

The base manifold is an n-box; a bundle is an (n+k)-box whose first n
coordinates are base coordinates.  This fixed layout (base first, fiber
after) is relied on everywhere: projections are coordinate projections and
vertical directions are the last k coordinate directions.
"""

import numpy as np

from gnk.errors import CompositionError, OutOfDomainError
from gnk.smooth import SmoothMap

__all__ = ["ChartManifold", "BundleChart", "BundleMap", "project",
           "vertical_projector", "trivial_bundle"]


class ChartManifold:
    """An n-dimensional manifold presented as a single coordinate box."""

    def __init__(self, dim, box, name="M"):
        self.dim = int(dim)
        self.box = np.asarray(box, dtype=float)
        if self.box.shape != (self.dim, 2):
            raise CompositionError("manifold box must have shape (n, 2)")
        if np.any(self.box[:, 1] <= self.box[:, 0]):
            raise CompositionError("manifold box needs positive side lengths")
        self.name = name

    def __repr__(self):
        return "ChartManifold(%s, dim=%d)" % (self.name, self.dim)

    def contains(self, x, tol=1e-12):
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.box[:, 0] - tol)
                    and np.all(x <= self.box[:, 1] + tol))


class BundleChart:
    """A fiber bundle chart: base box times fiber box, base coords first."""

    def __init__(self, base, fiber_dim, fiber_box, name="E"):
        self.base = base
        self.fiber_dim = int(fiber_dim)
        fiber_box = np.asarray(fiber_box, dtype=float)
        if fiber_box.shape != (self.fiber_dim, 2):
            raise CompositionError("fiber box must have shape (k, 2)")
        self.total_box = np.vstack([base.box, fiber_box])
        self.total_dim = base.dim + self.fiber_dim
        self.name = name
        n = base.dim
        self.projection = SmoothMap(
            self.total_dim, n, lambda e: list(e[:n]),
            box=self.total_box, name="%s.proj" % name)

    def __repr__(self):
        return "BundleChart(%s, n=%d, k=%d)" % (
            self.name, self.base.dim, self.fiber_dim)

    def split(self, e):
        e = np.asarray(e)
        return e[:self.base.dim], e[self.base.dim:]


def project(E, e):
    """Bundle projection: the first n coordinates of ``e``."""
    e = np.asarray(e, dtype=float)
    lo, hi = E.total_box[:, 0], E.total_box[:, 1]
    if np.any(e < lo - 1e-12) or np.any(e > hi + 1e-12):
        raise OutOfDomainError("point outside bundle chart %s" % E.name)
    return e[:E.base.dim]


def vertical_projector(E, e=None):
    """Idempotent matrix projecting T_eE onto the vertical subspace."""
    d, n = E.total_dim, E.base.dim
    pv = np.zeros((d, d))
    for i in range(n, d):
        pv[i, i] = 1.0
    return pv


class BundleMap:
    """A strict bundle map: base coordinates pass through unchanged."""

    def __init__(self, source, target, fiber_map, name="f"):
        """``fiber_map``: SmoothMap from source total coordinates to the
        target's k fiber coordinates; the base is carried over as-is."""
        if source.base.dim != target.base.dim:
            raise CompositionError("bundle map must preserve the base")
        self.source = source
        self.target = target
        n = source.base.dim
        fm_body = fiber_map.body
        self.map = SmoothMap(
            source.total_dim, target.total_dim,
            lambda e: list(e[:n]) + list(fm_body(e)),
            box=source.total_box, name=name)
        self.name = name

    def __call__(self, e):
        return self.map.eval(e)


def trivial_bundle(base, fiber_dim, half_width=5.0, name="E"):
    """Bundle chart with a symmetric fiber box [-w, w]^k."""
    fiber_box = [[-half_width, half_width]] * fiber_dim
    return BundleChart(base, fiber_dim, fiber_box, name=name)
