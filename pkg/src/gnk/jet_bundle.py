"""First and second jets of bundle sections, linearized jets, and the
twisted affine/linear duals (extended and ordinary multiphase points).

Chart conventions, used throughout:

* A jet at ``e`` is an (n+k) x n matrix whose top n x n block is the
  identity; the free data is the k x n fiber block ``v[a, mu]``.
* Jet-space coordinates are flattened as (x, y, v) with v row-major.
* Volume forms are stored as the single coefficient against
  dx^1 ^ ... ^ dx^n, so twisted-dual points carry (P, c) with evaluation
  z(u) = sum P[a, mu] v[a, mu] + c.
"""

import numpy as np

from gnk import dual
from gnk.errors import NotASectionError, NotSemiholonomicError

__all__ = [
    "Jet", "LinJet", "ExtendedCojetPoint", "OrdinaryCojetPoint",
    "Connection", "SecondJet",
    "jet_from_fiber_block", "jet_of_section", "second_jet_of_section",
    "jet_pushforward", "covariant_derivative", "linear_part",
    "eval_extended", "eval_ordinary", "semiholonomic_split",
    "is_prolongation",
]


class Jet:
    """First-order jet: base point of E plus an (n+k) x n matrix with
    identity top block."""

    def __init__(self, e, u):
        self.e = np.asarray(e, dtype=float)
        self.u = np.asarray(u, dtype=float)

    @property
    def n(self):
        return self.u.shape[1]

    @property
    def k(self):
        return self.u.shape[0] - self.u.shape[1]

    @property
    def fiber_block(self):
        return self.u[self.n:]

    def coords(self):
        """Flattened jet-space coordinates (x, y, v row-major)."""
        return np.concatenate([self.e, self.fiber_block.ravel()])

    def __repr__(self):
        return "Jet(e=%s, v=%s)" % (self.e, self.fiber_block.tolist())


class LinJet:
    """Linearized jet: base point plus a free k x n matrix."""

    def __init__(self, e, w):
        self.e = np.asarray(e, dtype=float)
        self.w = np.asarray(w, dtype=float)


class ExtendedCojetPoint:
    """Point of the twisted affine dual: momenta P[a, mu] and the affine
    constant c (coefficient of the coordinate volume form)."""

    def __init__(self, x, y, P, c):
        self.x = np.asarray(x, dtype=float)
        self.y = np.asarray(y, dtype=float)
        self.P = np.asarray(P, dtype=float)
        self.c = float(c)

    @property
    def e(self):
        return np.concatenate([self.x, self.y])

    def coords(self):
        return np.concatenate([self.x, self.y, self.P.ravel(), [self.c]])

    def __repr__(self):
        return "ExtendedCojetPoint(x=%s, y=%s, P=%s, c=%g)" % (
            self.x, self.y, self.P.tolist(), self.c)


class OrdinaryCojetPoint:
    """Point of the twisted linear dual: momenta only."""

    def __init__(self, x, y, P):
        self.x = np.asarray(x, dtype=float)
        self.y = np.asarray(y, dtype=float)
        self.P = np.asarray(P, dtype=float)

    @property
    def e(self):
        return np.concatenate([self.x, self.y])

    def coords(self):
        return np.concatenate([self.x, self.y, self.P.ravel()])

    def __repr__(self):
        return "OrdinaryCojetPoint(x=%s, y=%s, P=%s)" % (
            self.x, self.y, self.P.tolist())


class Connection:
    """A connection: smooth assignment e -> k x n fiber block of a jet."""

    def __init__(self, E, gamma):
        """``gamma``: SmoothMap from E-coordinates to k*n values."""
        self.E = E
        self.gamma = gamma

    def jet_at(self, e):
        n, k = self.E.base.dim, self.E.fiber_dim
        block = np.asarray(self.gamma.eval(e)).reshape(k, n)
        return jet_from_fiber_block(e, block)


class SecondJet:
    """Second-order jet data of a section: a first jet plus the
    derivatives W[a, mu, nu] of its fiber block along base directions.

    The base second block is identically zero in these charts because the
    bundle projection is a coordinate projection, so only W is stored."""

    def __init__(self, jet, W):
        self.jet = jet
        self.W = np.asarray(W, dtype=float)


def jet_from_fiber_block(e, block):
    block = np.asarray(block, dtype=float)
    k, n = block.shape
    return Jet(e, np.vstack([np.eye(n), block]))


def _check_section(E, phi, x, tol=1e-10):
    ex = phi.eval(x)
    if np.max(np.abs(np.asarray(ex)[:E.base.dim] - np.asarray(x))) > tol:
        raise NotASectionError(
            "%s is not a strict section of %s" % (phi.name, E.name))
    return ex


def jet_of_section(E, phi, x):
    """First jet prolongation of a section at a base point."""
    e = _check_section(E, phi, x)
    jac = phi.jacobian(x)
    return Jet(e, np.vstack([np.eye(E.base.dim), jac[E.base.dim:]]))


def second_jet_of_section(E, phi, x):
    """Second jet prolongation; W from mixed second directionals."""
    n, k = E.base.dim, E.fiber_dim
    j1 = jet_of_section(E, phi, x)
    W = np.zeros((k, n, n))
    for mu in range(n):
        emu = np.eye(n)[mu]
        for nu in range(mu, n):
            d2 = phi.second_directional(x, emu, np.eye(n)[nu])
            W[:, mu, nu] = d2[n:]
            W[:, nu, mu] = d2[n:]
    return SecondJet(j1, W)


def jet_pushforward(f, u):
    """Push a jet through a strict bundle map: T f composed with u."""
    e2 = f(u.e)
    jac = f.map.jacobian(u.e)
    u2 = np.dot(jac, u.u)
    n = u.n
    u2[:n] = np.eye(n)  # base rows are exact since f is strict over M
    return Jet(e2, u2)


def covariant_derivative(E, phi, conn, x):
    """Fiber block of the jet of ``phi`` minus the connection at phi(x)."""
    j = jet_of_section(E, phi, x)
    horiz = conn.jet_at(j.e)
    return LinJet(j.e, j.fiber_block - horiz.fiber_block)


def linear_part(z):
    """The bundle projection onto the ordinary (linear) dual: drop c."""
    return OrdinaryCojetPoint(z.x, z.y, z.P)


def eval_extended(z, u):
    """Affine pairing of an extended cojet point with a jet."""
    return float(np.sum(z.P * u.fiber_block) + z.c)


def eval_ordinary(z, w):
    """Linear pairing of an ordinary cojet point with a linearized jet."""
    return float(np.sum(z.P * w.w))


def semiholonomic_split(s, tol=1e-9):
    """Split a semiholonomic second jet into symmetric and antisymmetric
    parts in the two base indices; the symmetric part is the holonomic
    representative."""
    W = s.W
    if W.ndim != 3 or W.shape[1] != W.shape[2]:
        raise NotSemiholonomicError("second block must be k x n x n")
    w_sym = 0.5 * (W + W.transpose(0, 2, 1))
    w_alt = 0.5 * (W - W.transpose(0, 2, 1))
    return w_sym, w_alt


def is_prolongation(E, psi, x, tol=1e-8):
    """Holonomy predicate: a section of JE (coordinates (x, y, v)) is a
    prolongation iff its v-block equals the Jacobian of its E-part."""
    n, k = E.base.dim, E.fiber_dim
    out = psi.eval(x)
    v = np.asarray(out[n + k:]).reshape(k, n)
    jac = psi.jacobian(x)
    return bool(np.max(np.abs(v - jac[n:n + k, :])) <= tol)
