"""The jet groupoid JG: first-order Taylor data of bisections.

An element is a pair (g, U) with U an N x n matrix satisfying
T_g sigma . U = id and T_g tau . U invertible.  Multiplication, inversion
and units are matrix algebra through the Jacobians of the underlying
groupoid's structure maps:

    (v . u).U = T mu . (V . frame(u), U)        at (h, g)
    u^-1.U    = T iota . U . frame(U)^-1        at iota(g)
    unit(x).U = T unit(x)

``as_groupoid_chart`` packages JG itself as a :class:`GroupoidChart` with
dual-number-safe bodies, so jets of JG-bisections (second-order elements)
and the algebroid of JG come for free from the same machinery.
"""

import numpy as np

from gnk import dual
from gnk.errors import (CompositionError, DegenerateFrameError,
                        NotSemiholonomicError)
from gnk.groupoid import COMPAT_TOL, GroupoidChart
from gnk.linal import gdet, ginv, kernel_basis, mdot, to_float
from gnk.smooth import SmoothMap

__all__ = [
    "JetElement", "SecondJetElement", "frame_of",
    "jg_multiply", "jg_invert", "jg_unit", "jg_project",
    "jet_of_bisection", "pairjet_to_frame", "pair_jet_from_frame",
    "semiholonomic2_check", "holonomic2_check", "in_subgroupoid",
    "orthonormal_jet_predicate", "as_groupoid_chart", "sample_jet_element",
    "sample_second_order_element",
]

_DET_TOL = 1e-9


class JetElement:
    """A jet-groupoid element: a groupoid element with its N x n matrix."""

    def __init__(self, G, g, U):
        self.G = G
        self.g = np.asarray(g, dtype=float)
        self.U = np.asarray(U, dtype=float)

    def __repr__(self):
        return "JetElement(g=%s)" % (self.g,)

    def validate(self, tol=1e-10):
        n = self.G.base.dim
        ts = to_float(self.G.sigma.jacobian(self.g))
        res = np.max(np.abs(ts @ self.U - np.eye(n)))
        if res > tol:
            raise CompositionError(
                "jet element violates the source constraint: %g" % res)
        if abs(np.linalg.det(frame_of(self))) <= _DET_TOL:
            raise DegenerateFrameError("jet element has singular frame")
        return True

    def coords(self):
        return np.concatenate([self.g, self.U.ravel()])


class SecondJetElement:
    """Second-order data over a JetElement: derivatives (dg, dU) of a
    JG-valued section along base directions.  Semiholonomic iff dg = U."""

    def __init__(self, G, g, U, dg, dU):
        self.G = G
        self.g = np.asarray(g, dtype=float)
        self.U = np.asarray(U, dtype=float)
        self.dg = np.asarray(dg, dtype=float)
        self.dU = np.asarray(dU, dtype=float)

    @property
    def base(self):
        return JetElement(self.G, self.g, self.U)

    def jg_matrix(self):
        """The (N + N*n) x n matrix realizing this element as a jet of the
        JG chart (rows: dg, then dU row-major in (i, mu))."""
        N, n = self.U.shape
        rows = np.empty((N + N * n, n))
        rows[:N] = self.dg
        for i in range(N):
            for mu in range(n):
                rows[N + i * n + mu] = self.dU[i, mu]
        return rows

    def jg_jet(self, JG):
        return JetElement(JG, np.concatenate([self.g, self.U.ravel()]),
                          self.jg_matrix())


def frame_of(u):
    """The n x n base frame T tau . U of a jet element."""
    tt = to_float(u.G.tau.jacobian(u.g))
    return tt @ u.U


def jg_multiply(G, v, u, tol=COMPAT_TOL):
    h, g = v.g, u.g
    if np.max(np.abs(G.sigma.eval(h) - G.tau.eval(g))) > tol:
        raise CompositionError("incompatible jet elements")
    frame_u = frame_of(u)
    tm = to_float(G.mu.jacobian(np.concatenate([h, g])))
    stacked = np.vstack([v.U @ frame_u, u.U])
    w = JetElement(G, G.mu.eval(np.concatenate([h, g])), tm @ stacked)
    if abs(np.linalg.det(frame_of(w))) <= _DET_TOL:
        raise DegenerateFrameError("product jet has singular frame")
    return w


def jg_invert(G, u):
    fr = frame_of(u)
    if abs(np.linalg.det(fr)) <= _DET_TOL:
        raise DegenerateFrameError("cannot invert jet with singular frame")
    ti = to_float(G.inv.jacobian(u.g))
    return JetElement(G, G.inv.eval(u.g),
                      ti @ u.U @ np.linalg.inv(fr))


def jg_unit(G, x):
    return JetElement(G, G.unit.eval(x), to_float(G.unit.jacobian(x)))


def jg_project(u):
    """The three projections of JG: element, base frame, and their pair."""
    fr = frame_of(u)
    return u.g, fr, (fr, u.g)


def jet_of_bisection(G, b, x, order=1):
    """Jet prolongation of a bisection at a base point."""
    x = np.asarray(x, dtype=float)
    g = b.map.eval(x)
    U = to_float(b.map.jacobian(x))
    if order == 1:
        return JetElement(G, g, U)
    if order != 2:
        raise CompositionError("jet order must be 1 or 2")
    n, N = G.base.dim, G.dim
    dU = np.zeros((N, n, n))
    for mu in range(n):
        for nu in range(mu, n):
            d2 = to_float(
                b.map.second_directional(x, np.eye(n)[mu], np.eye(n)[nu]))
            dU[:, mu, nu] = d2
            dU[:, nu, mu] = d2
    return SecondJetElement(G, g, U, U.copy(), dU)


def pairjet_to_frame(frame_G, u):
    """Example isomorphism: a jet of the pair groupoid is exactly a frame
    groupoid element (y, x, T tau . U)."""
    n = u.G.base.dim
    y, x = u.g[:n], u.g[n:]
    return np.concatenate([y, x, frame_of(u).ravel()])


def pair_jet_from_frame(pair_G, y, x, a):
    """Inverse of ``pairjet_to_frame``: U = (a; identity)."""
    n = pair_G.base.dim
    a = np.asarray(a, dtype=float).reshape(n, n)
    return JetElement(pair_G, np.concatenate([y, x]),
                      np.vstack([a, np.eye(n)]))


def semiholonomic2_check(s, tol=1e-9):
    return bool(np.max(np.abs(s.dg - s.U)) <= tol)


def holonomic2_check(s, tol=1e-9):
    if not semiholonomic2_check(s, tol):
        return False
    asym = s.dU - s.dU.transpose(0, 2, 1)
    return bool(np.max(np.abs(asym)) <= tol)


def in_subgroupoid(pred, u):
    return bool(pred(u))


def orthonormal_jet_predicate(metric, tol=COMPAT_TOL):
    """Predicate: the base frame of a pair-groupoid jet element lies in
    O(TM, g) for the given metric field (constant matrix or callable)."""
    if not callable(metric):
        m = np.asarray(metric, dtype=float)
        metric = lambda x: m  # noqa: E731

    def pred(u):
        n = u.G.base.dim
        y, x = u.g[:n], u.g[n:2 * n]
        a = frame_of(u)
        return bool(np.max(np.abs(a.T @ metric(y) @ a - metric(x))) <= tol)

    return pred


# ---------------------------------------------------------------------------
# JG as a groupoid chart (dual-number-safe bodies)


def _obj_mat(vals, r, c):
    m = np.empty((r, c), dtype=object)
    idx = 0
    for i in range(r):
        for j in range(c):
            m[i, j] = vals[idx]
            idx += 1
    return m


def _flat(m):
    return [m[i, j] for i in range(m.shape[0]) for j in range(m.shape[1])]


def as_groupoid_chart(G):
    """Present JG itself as a GroupoidChart with coordinates (g, U flat).

    All bodies carry dual numbers, so jets of JG-bisections (second-order
    jet elements) and the algebroid of JG can be computed by the generic
    machinery.
    """
    n, N = G.base.dim, G.dim
    NJ = N + N * n
    sigma_body, tau_body = G.sigma.body, G.tau.body
    mu_body, unit_body, inv_body = G.mu.body, G.unit.body, G.inv.body

    jg_sigma = SmoothMap(NJ, n, lambda c: sigma_body(list(c[:N])),
                         name="jg_sigma")
    jg_tau = SmoothMap(NJ, n, lambda c: tau_body(list(c[:N])),
                       name="jg_tau")

    def jg_mu_body(hv):
        h, g = list(hv[:N]), list(hv[NJ:NJ + N])
        V = _obj_mat(hv[N:NJ], N, n)
        U = _obj_mat(hv[NJ + N:], N, n)
        tt = dual.jacobian(tau_body, g, n)
        frame_u = mdot(tt, U)
        tm = dual.jacobian(mu_body, h + g, N)
        stacked = np.vstack([mdot(V, frame_u), U])
        W = mdot(tm, stacked)
        return list(mu_body(h + g)) + _flat(W)

    def jg_unit_body(x):
        ju = dual.jacobian(unit_body, list(x), N)
        return list(unit_body(list(x))) + _flat(np.asarray(ju))

    def jg_inv_body(c):
        g = list(c[:N])
        U = _obj_mat(c[N:], N, n)
        tt = dual.jacobian(tau_body, g, n)
        fr = mdot(tt, U)
        ti = dual.jacobian(inv_body, g, N)
        W = mdot(mdot(ti, U), ginv(fr))
        return list(inv_body(g)) + _flat(W)

    def sampler(rng):
        return sample_jet_element(G, rng).coords()

    return GroupoidChart(
        G.base, NJ, jg_sigma, jg_tau,
        SmoothMap(2 * NJ, NJ, jg_mu_body, name="jg_mu"),
        SmoothMap(n, NJ, jg_unit_body, name="jg_unit"),
        SmoothMap(NJ, NJ, jg_inv_body, name="jg_inv"),
        sampler=sampler, name="J(%s)" % G.name)


def sample_second_order_element(G, rng, spread=0.3, semiholonomic=True):
    """Random valid second-order jet element (g, U, dg, dU).

    Constraints (for the built-ins, whose source maps are coordinate
    projections so T sigma is constant): dg satisfies T sigma . dg = id
    like U does, and each base-direction slice dU[:, :, nu] lies row-wise
    in ker(T sigma) — otherwise the element would not be tangent to the
    jet-constraint submanifold that JG is.  ``semiholonomic`` forces
    dg = U; the returned dU is generically asymmetric in its two base
    indices either way (non-holonomic).
    """
    u = sample_jet_element(G, rng)
    n = G.base.dim
    ts = to_float(G.sigma.jacobian(u.g))
    tt = to_float(G.tau.jacobian(u.g))
    ker = kernel_basis(ts)
    if semiholonomic:
        dg = u.U.copy()
    else:
        for _ in range(50):
            dg = np.linalg.pinv(ts) + ker @ (
                spread * rng.standard_normal((ker.shape[1], n)))
            if abs(np.linalg.det(tt @ dg)) > 0.05:
                break
        else:
            raise DegenerateFrameError("could not sample dg")
    dU = np.zeros((G.dim, n, n))
    for nu in range(n):
        dU[:, :, nu] = ker @ (
            spread * rng.standard_normal((ker.shape[1], n)))
    return SecondJetElement(G, u.g, u.U, dg, dU)


def sample_jet_element(G, rng, spread=0.4, g=None):
    """Random valid JetElement over a random element of G (or over the
    supplied element ``g``).

    The source constraint T sigma . U = id is affine; a particular
    solution (least squares) plus a random kernel combination spans all
    solutions, and frames too close to singular are re-drawn.
    """
    g_fixed = g
    for _ in range(50):
        g = g_fixed if g_fixed is not None else G.sample_element(rng)
        ts = to_float(G.sigma.jacobian(g))
        tt = to_float(G.tau.jacobian(g))
        n = G.base.dim
        u0 = np.linalg.pinv(ts)
        ker = kernel_basis(ts)
        U = u0 + ker @ (spread * rng.standard_normal((ker.shape[1], n)))
        if abs(np.linalg.det(tt @ U)) > 0.05:
            return JetElement(G, g, U)
    raise DegenerateFrameError("could not sample a nondegenerate jet")
