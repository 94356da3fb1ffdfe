"""Lie groupoids in a single chart.

A :class:`GroupoidChart` packages the five structure maps (source, target,
multiplication, unit, inversion) as dual-number-safe smooth maps, plus an
optional membership predicate carving out a subgroupoid.

Built-in examples and their element layouts:

* ``pair``              -- (y, x): arrow from x to y; N = 2n.
* ``frame``             -- (y, x, A row-major): invertible frame from
                           T_xM to T_yM; N = 2n + n^2.
* ``group_bundle``      -- (x, theta): SO(2) angle over each base point;
                           N = n + 1; source = target.
* ``orthonormal_frame`` -- frame layout plus membership A^T G(y) A = G(x)
                           for a metric field G.
"""

import numpy as np

from gnk import dual
from gnk.errors import CompositionError, InversionError
from gnk.linal import ginv, mdot, to_float
from gnk.smooth import SmoothMap, identity_map

__all__ = ["GroupoidChart", "Bisection", "multiply", "invert", "unit",
           "is_isotropy", "builtin_groupoid", "pair_bisection",
           "unit_bisection", "bisection_product", "bisection_inverse",
           "tau_part"]

COMPAT_TOL = 1e-9


class GroupoidChart:
    """A Lie groupoid presented by evaluable structure maps."""

    def __init__(self, base, total_dim, sigma, tau, mu, unit, inv,
                 membership=None, sampler=None, metric=None, name="G"):
        self.base = base
        self.dim = int(total_dim)
        self.sigma = sigma
        self.tau = tau
        self.mu = mu
        self.unit = unit
        self.inv = inv
        self.membership = membership
        self._sampler = sampler
        self.metric = metric
        self.name = name

    def __repr__(self):
        return "GroupoidChart(%s, N=%d over %s)" % (
            self.name, self.dim, self.base.name)

    def sample_element(self, rng):
        if self._sampler is None:
            raise CompositionError(
                "%s has no element sampler" % self.name)
        return self._sampler(rng)

    def contains(self, g, tol=COMPAT_TOL):
        if self.membership is None:
            return True
        return bool(self.membership(np.asarray(g, dtype=float), tol))


def multiply(G, h, g, tol=COMPAT_TOL):
    """Product hg; requires sigma(h) = tau(g)."""
    h = np.asarray(h, dtype=float)
    g = np.asarray(g, dtype=float)
    gap = np.max(np.abs(G.sigma.eval(h) - G.tau.eval(g)))
    if gap > tol:
        raise CompositionError(
            "incompatible pair: |sigma(h) - tau(g)| = %g" % gap)
    return G.mu.eval(np.concatenate([h, g]))


def invert(G, g):
    return G.inv.eval(g)


def unit(G, x):
    return G.unit.eval(x)


def is_isotropy(G, g, tol=COMPAT_TOL):
    return bool(np.max(np.abs(G.sigma.eval(g) - G.tau.eval(g))) < tol)


# ---------------------------------------------------------------------------
# built-in groupoids


def _coord_map(N, idx, box=None, name="coord"):
    idx = list(idx)
    return SmoothMap(N, len(idx), lambda g: [g[i] for i in idx],
                     box=box, name=name)


def _flat_matmul(b, a, n):
    """Row-major product of two flattened n x n matrices."""
    out = []
    for i in range(n):
        for j in range(n):
            acc = 0.0
            for l in range(n):
                acc = acc + b[i * n + l] * a[l * n + j]
            out.append(acc)
    return out


def _pair_groupoid(base):
    n = base.dim
    N = 2 * n
    sigma = _coord_map(N, range(n, N), name="sigma")
    tau = _coord_map(N, range(n), name="tau")
    mu = SmoothMap(2 * N, N,
                   lambda hg: list(hg[:n]) + list(hg[N + n:]),
                   name="mu")
    un = SmoothMap(n, N, lambda x: list(x) + list(x), name="unit")
    inv = SmoothMap(N, N, lambda g: list(g[n:]) + list(g[:n]), name="inv")

    def sampler(rng):
        from gnk.smooth import box_sampler
        return np.concatenate([box_sampler(base.box, rng),
                               box_sampler(base.box, rng)])

    return GroupoidChart(base, N, sigma, tau, mu, un, inv,
                         sampler=sampler, name="pair(%s)" % base.name)


def _frame_structure_maps(base):
    n = base.dim
    N = 2 * n + n * n
    sigma = _coord_map(N, range(n, 2 * n), name="sigma")
    tau = _coord_map(N, range(n), name="tau")

    def mu_body(hg):
        h, g = hg[:N], hg[N:]
        bf = h[2 * n:]
        af = g[2 * n:]
        return list(h[:n]) + list(g[n:2 * n]) + _flat_matmul(bf, af, n)

    mu = SmoothMap(2 * N, N, mu_body, name="mu")

    def unit_body(x):
        eye = [1.0 if i == j else 0.0 for i in range(n) for j in range(n)]
        return list(x) + list(x) + eye

    un = SmoothMap(n, N, unit_body, name="unit")

    def inv_body(g):
        a = np.empty((n, n), dtype=object)
        for i in range(n):
            for j in range(n):
                a[i, j] = g[2 * n + i * n + j]
        ai = ginv(a)
        return list(g[n:2 * n]) + list(g[:n]) + [ai[i, j]
                                                 for i in range(n)
                                                 for j in range(n)]

    inv = SmoothMap(N, N, inv_body, name="inv")
    return N, sigma, tau, mu, un, inv


def _frame_groupoid(base):
    n = base.dim
    N, sigma, tau, mu, un, inv = _frame_structure_maps(base)

    def sampler(rng):
        from gnk.smooth import box_sampler
        while True:
            a = np.eye(n) + 0.4 * rng.standard_normal((n, n))
            if abs(np.linalg.det(a)) > 0.3:
                break
        return np.concatenate([box_sampler(base.box, rng),
                               box_sampler(base.box, rng), a.ravel()])

    return GroupoidChart(base, N, sigma, tau, mu, un, inv,
                         sampler=sampler, name="frame(%s)" % base.name)


def _so2_bundle(base):
    n = base.dim
    N = n + 1
    sigma = _coord_map(N, range(n), name="sigma")
    tau = _coord_map(N, range(n), name="tau")
    mu = SmoothMap(2 * N, N,
                   lambda hg: list(hg[N:N + n]) + [hg[n] + hg[N + n]],
                   name="mu")
    un = SmoothMap(n, N, lambda x: list(x) + [0.0], name="unit")
    inv = SmoothMap(N, N, lambda g: list(g[:n]) + [-g[n]], name="inv")

    def sampler(rng):
        from gnk.smooth import box_sampler
        return np.concatenate([box_sampler(base.box, rng),
                               [rng.uniform(-np.pi, np.pi)]])

    return GroupoidChart(base, N, sigma, tau, mu, un, inv,
                         sampler=sampler,
                         name="group_bundle(%s,SO(2))" % base.name)


def _metric_field(base, metric):
    """Normalize a metric spec (constant matrix or callable) to a callable
    x -> n x n float matrix."""
    if callable(metric):
        return metric
    m = np.asarray(metric, dtype=float)
    return lambda x: m


def _orthonormal_frame_groupoid(base, metric):
    n = base.dim
    gfield = _metric_field(base, metric)
    G = _frame_groupoid(base)

    def membership(g, tol=COMPAT_TOL):
        y, x = g[:n], g[n:2 * n]
        a = g[2 * n:].reshape(n, n)
        res = a.T @ gfield(y) @ a - gfield(x)
        return bool(np.max(np.abs(res)) <= tol)

    def sampler(rng):
        from gnk.smooth import box_sampler
        y = box_sampler(base.box, rng)
        x = box_sampler(base.box, rng)
        a = orthonormal_frame_matrix(gfield(y), gfield(x), rng)
        return np.concatenate([y, x, a.ravel()])

    return GroupoidChart(base, G.dim, G.sigma, G.tau, G.mu, G.unit, G.inv,
                         membership=membership, sampler=sampler,
                         metric=gfield,
                         name="orthonormal_frame(%s)" % base.name)


def orthonormal_frame_matrix(gy, gx, rng):
    """A matrix with A^T gy A = gx.

    Riemannian metrics: Cholesky conjugation of a random orthogonal matrix.
    The 1+1 Minkowski metric diag(1,-1): a random boost times reflection
    signs, since Cholesky does not exist there.
    """
    n = len(gx)
    if np.all(np.linalg.eigvalsh(gy) > 0):
        ly = np.linalg.cholesky(gy).T
        lx = np.linalg.cholesky(gx).T
        q, r = np.linalg.qr(rng.standard_normal((n, n)))
        q = q @ np.diag(np.sign(np.diag(r)))
        return np.linalg.solve(ly, q @ lx)
    if n == 2 and np.allclose(gy, np.diag([1.0, -1.0])) \
            and np.allclose(gx, np.diag([1.0, -1.0])):
        r = rng.uniform(-1.5, 1.5)
        boost = np.array([[np.cosh(r), np.sinh(r)],
                          [np.sinh(r), np.cosh(r)]])
        signs = np.diag(rng.choice([-1.0, 1.0], size=2))
        return boost @ signs
    raise CompositionError("unsupported metric signature for frame sampling")


_BUILTIN_GROUPOIDS = {
    "pair": _pair_groupoid,
    "frame": _frame_groupoid,
    "group_bundle": _so2_bundle,
    "orthonormal_frame": _orthonormal_frame_groupoid,
}


def builtin_groupoid(name, base, **params):
    try:
        ctor = _BUILTIN_GROUPOIDS[name]
    except KeyError:
        raise CompositionError("unknown groupoid kind %r" % name) from None
    return ctor(base, **params)


# ---------------------------------------------------------------------------
# bisections


class Bisection:
    """A section of the source map whose target composition is a
    diffeomorphism of the base."""

    def __init__(self, G, beta, inverse_tau=None, name="beta"):
        self.G = G
        self.map = beta
        self.inverse_tau = inverse_tau
        self.name = name

    def __call__(self, x):
        return self.map.eval(x)

    def tau_of(self, x):
        return self.G.tau.eval(self.map.eval(x))


def tau_part(b):
    """The base diffeomorphism tau o beta as a SmoothMap."""
    return b.G.tau.compose(b.map)


def pair_bisection(G, f, f_inv=None, name="beta"):
    """Bisection (f(x), x) of a pair groupoid from a base map f."""
    n = G.base.dim
    f_body = f.body
    beta = SmoothMap(n, G.dim, lambda x: list(f_body(x)) + list(x),
                     name=name)
    return Bisection(G, beta, inverse_tau=f_inv, name=name)


def unit_bisection(G):
    return Bisection(G, G.unit, inverse_tau=identity_map(G.base.dim),
                     name="unit")


def bisection_product(G, b2, b1):
    """(b2 b1)(x) = b2(tau(b1(x))) . b1(x)."""
    n, N = G.base.dim, G.dim
    b1_body, b2_body = b1.map.body, b2.map.body
    tau_body, mu_body = G.tau.body, G.mu.body

    def body(x):
        g1 = b1_body(list(x))
        g2 = b2_body(list(tau_body(list(g1))))
        return mu_body(list(g2) + list(g1))

    inverse_tau = None
    if b1.inverse_tau is not None and b2.inverse_tau is not None:
        inverse_tau = b1.inverse_tau.compose(b2.inverse_tau)
    return Bisection(G, SmoothMap(n, N, body, name="product"),
                     inverse_tau=inverse_tau,
                     name="%s.%s" % (b2.name, b1.name))


def _newton_inverse(f, target, x0, max_iter=50, tol=1e-12):
    """Solve f(v) = target for plain float inputs."""
    v = np.asarray(x0, dtype=float).copy()
    for _ in range(max_iter):
        r = np.asarray(f.eval(v)) - target
        if np.max(np.abs(r)) < tol:
            return v
        v = v - np.linalg.solve(to_float(f.jacobian(v)), r)
    raise InversionError("Newton inversion of %s did not converge" % f.name)


def bisection_inverse(G, b):
    """Pointwise groupoid inverse composed with the inverse base map."""
    n, N = G.base.dim, G.dim
    f = tau_part(b)
    b_body, inv_body = b.map.body, G.inv.body
    f_inv = b.inverse_tau

    def preimage(x):
        if f_inv is not None:
            return list(f_inv.body(list(x)))
        if all(isinstance(xi, (int, float)) for xi in x):
            return list(_newton_inverse(f, np.asarray(x, dtype=float),
                                        np.asarray(x, dtype=float)))
        # dual-number input: converge the float part first, then run a few
        # Newton steps in dual arithmetic (each doubles the correct
        # Taylor order of the inverse)
        v0 = _newton_inverse(f, to_float(np.asarray(x, dtype=object)),
                             to_float(np.asarray(x, dtype=object)))
        v = [float(vi) for vi in v0]
        for _ in range(3):
            r = np.asarray(f.body(list(v)), dtype=object) \
                - np.asarray(list(x), dtype=object)
            step = mdot(ginv(dual.jacobian(f.body, v, n)), r)
            v = [vi - si for vi, si in zip(v, step)]
        return v

    def body(x):
        xi = preimage(x)
        return inv_body(list(b_body(xi)))

    inverse_tau = None
    if b.inverse_tau is not None:
        inverse_tau = f  # inverse of the inverse base map is f itself
    return Bisection(G, SmoothMap(n, N, body, name="inverse"),
                     inverse_tau=inverse_tau,
                     name="%s^-1" % b.name)
