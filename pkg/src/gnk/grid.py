"""Regular-grid sections of a bundle chart.

A :class:`GridSection` stores field values (and optionally momenta) on a
uniform n-dimensional grid and produces jets by second-order centered
differences.  Axis 0 is time in the solvers; spatial axes may be
periodic, in which case differences wrap.
"""

import numpy as np

from gnk.errors import GridError

__all__ = ["GridSection"]


class GridSection:
    """Field y[a] (and optional momenta P[a, mu]) sampled on a grid.

    ``origin``/``spacing``/``shape``: per-axis grid geometry;
    ``periodic``: per-axis wrap flags; ``y``: array of shape
    (k,) + shape; ``P``: None or (k, n) + shape.
    """

    def __init__(self, origin, spacing, shape, y, P=None, periodic=None,
                 meta=None):
        self.origin = np.asarray(origin, dtype=float)
        self.spacing = np.asarray(spacing, dtype=float)
        self.shape = tuple(int(s) for s in shape)
        self.n = len(self.shape)
        self.y = np.asarray(y, dtype=float)
        self.k = self.y.shape[0]
        if self.y.shape != (self.k,) + self.shape:
            raise GridError("field array shape does not match the grid")
        self.P = None if P is None else np.asarray(P, dtype=float)
        if self.P is not None \
                and self.P.shape != (self.k, self.n) + self.shape:
            raise GridError("momentum array shape does not match the grid")
        if periodic is None:
            periodic = (False,) * self.n
        self.periodic = tuple(bool(p) for p in periodic)
        self.meta = dict(meta or {})

    def point(self, idx):
        """Base coordinates of the node ``idx``."""
        return self.origin + self.spacing * np.asarray(idx, dtype=float)

    def value(self, idx):
        return self.y[(slice(None),) + tuple(idx)]

    def is_interior(self, idx):
        for ax, i in enumerate(idx):
            if not self.periodic[ax] and not 0 < i < self.shape[ax] - 1:
                return False
        return True

    def _shifted(self, arr, idx, ax, step):
        i = list(idx)
        i[ax] += step
        if self.periodic[ax]:
            i[ax] %= self.shape[ax]
        elif not 0 <= i[ax] < self.shape[ax]:
            raise GridError("centered difference hit the grid boundary")
        return arr[(slice(None),) + tuple(i)]

    def derivative(self, idx, ax, arr=None):
        """Centered difference of the field (or a supplied (k,)+shape
        array) along axis ``ax`` at node ``idx``."""
        arr = self.y if arr is None else arr
        plus = self._shifted(arr, idx, ax, +1)
        minus = self._shifted(arr, idx, ax, -1)
        return (plus - minus) / (2.0 * self.spacing[ax])

    def fiber_jet(self, idx):
        """Grid jet v[a, mu] at ``idx`` by centered differences."""
        v = np.empty((self.k, self.n))
        for ax in range(self.n):
            v[:, ax] = self.derivative(idx, ax)
        return v

    def jet_coords(self, idx):
        """Flattened jet-space coordinates (x, y, v) at ``idx``."""
        return np.concatenate([self.point(idx), self.value(idx),
                               self.fiber_jet(idx).ravel()])

    def interior_indices(self):
        ranges = []
        for ax in range(self.n):
            if self.periodic[ax]:
                ranges.append(range(self.shape[ax]))
            else:
                ranges.append(range(1, self.shape[ax] - 1))
        out = np.stack(np.meshgrid(*ranges, indexing="ij"), axis=-1)
        return out.reshape(-1, self.n)
