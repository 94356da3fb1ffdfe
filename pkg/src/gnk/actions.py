"""Groupoid actions on fiber bundles and everything they induce.

An :class:`ActionChart` packages a left action Phi(g, e) of a groupoid
chart on a bundle chart (covering the target map: the base point of
Phi(g, e) is tau(g)).  From Phi alone, the module derives the induced
actions on vertical vectors, jets, linearized jets, extended and
ordinary cojet points, tangent vectors and tensors; representations of
the bisection group on each of those spaces; fundamental vector fields
of algebroid sections; and invariance reports for tensor fields.

Sign/layout conventions follow the rest of the package: bundle points
are (x, y) with base first, jets are (n+k) x n matrices with identity
top block, and volume coefficients are taken against dx^1 ^...^ dx^n.
"""

import numpy as np

from gnk import dual
from gnk.errors import CompositionError, DegenerateFrameError
from gnk.groupoid import COMPAT_TOL, Bisection
from gnk.jet_bundle import (ExtendedCojetPoint, Jet, LinJet,
                            OrdinaryCojetPoint, jet_from_fiber_block)
from gnk.jet_groupoid import (JetElement, frame_of, jet_of_bisection,
                              jg_invert, jg_unit, sample_jet_element)
from gnk.linal import to_float
from gnk.smooth import SmoothMap, box_sampler

__all__ = [
    "ActionChart", "TensorPoint",
    "act", "act_vertical", "vertical_matrix", "act_jet", "act_linjet",
    "act_extended_cojet", "act_ordinary_cojet", "act_tangent",
    "tangent_matrix", "act_tensor", "act_form", "apply_bisection",
    "fundamental_vector_field", "check_tensor_invariance",
    "builtin_action", "transport_action", "rotation_action",
    "frame_transport_action",
    "element_with_source", "sample_compatible_pair",
    "sample_compatible_jet", "second_order_cojet_map",
]

_DET_TOL = 1e-9


class ActionChart:
    """A groupoid action: Phi maps (g, e) concatenated to a point of E."""

    def __init__(self, G, E, phi, name="Phi"):
        self.G = G
        self.E = E
        self.phi = phi
        self.name = name

    def __repr__(self):
        return "ActionChart(%s: %s on %s)" % (
            self.name, self.G.name, self.E.name)


class TensorPoint:
    """A tensor at a bundle point: ``r`` contravariant slots followed by
    ``s`` covariant slots, components indexed over T_eE in the chart
    basis (shape (n+k)^(r+s), contravariant axes first)."""

    def __init__(self, e, r, s, components):
        self.e = np.asarray(e, dtype=float)
        self.r = int(r)
        self.s = int(s)
        self.components = np.asarray(components, dtype=float)
        d = len(self.e)
        if self.components.shape != (d,) * (self.r + self.s):
            raise CompositionError("tensor components have the wrong shape")

    def __repr__(self):
        return "TensorPoint(r=%d, s=%d, e=%s)" % (self.r, self.s, self.e)


def _check_compatible(A, g, e, tol=COMPAT_TOL):
    src = np.asarray(A.G.sigma.eval(g), dtype=float)
    base = np.asarray(e, dtype=float)[:A.E.base.dim]
    gap = np.max(np.abs(src - base))
    if gap > tol:
        raise CompositionError(
            "action pair incompatible: |sigma(g) - pi(e)| = %g" % gap)


def act(A, g, e, tol=COMPAT_TOL):
    """The action Phi(g, e); its base point is tau(g)."""
    _check_compatible(A, g, e, tol)
    return np.asarray(
        A.phi.eval(np.concatenate([np.asarray(g, dtype=float),
                                   np.asarray(e, dtype=float)])),
        dtype=float)


def action_jacobian(A, g, e):
    """Full (n+k) x (N + n+k) Jacobian of Phi at (g, e)."""
    ge = np.concatenate([np.asarray(g, dtype=float),
                         np.asarray(e, dtype=float)])
    return to_float(A.phi.jacobian(ge))


def act_vertical(A, g, v_e, tol=COMPAT_TOL):
    """Derivative of the left translation L_g = Phi(g, .) on a vertical
    vector: (e, v) with v vertical maps to (Phi(g, e), T L_g v)."""
    e, v = v_e
    _check_compatible(A, g, e, tol)
    jac = action_jacobian(A, g, e)[:, A.G.dim:]
    return act(A, g, e, tol), jac @ np.asarray(v, dtype=float)


def vertical_matrix(A, g, e):
    """The k x k matrix of T L_g restricted to the vertical subspace,
    expressed in fiber coordinates."""
    n = A.E.base.dim
    jac = action_jacobian(A, g, e)[:, A.G.dim:]
    return jac[n:, n:]


def act_jet(A, u, w, tol=COMPAT_TOL):
    """Induced jet-groupoid action on JE: T Phi composed with (u, w) and
    reparametrized by frame(u)^-1; returns a strict Jet (identity top
    block restored exactly)."""
    _check_compatible(A, u.g, w.e, tol)
    a = frame_of(u)
    if abs(np.linalg.det(a)) <= _DET_TOL:
        raise DegenerateFrameError("jet action needs an invertible frame")
    jac = action_jacobian(A, u.g, w.e)
    stacked = np.vstack([u.U, w.u])
    m = jac @ stacked @ np.linalg.inv(a)
    n = A.E.base.dim
    e2 = act(A, u.g, w.e, tol)
    return jet_from_fiber_block(e2, m[n:])


def act_linjet(A, a, g, w, tol=COMPAT_TOL):
    """Linearized-jet action: vertical action columnwise, then the frame
    reparametrization by a^-1."""
    a = np.asarray(a, dtype=float)
    if abs(np.linalg.det(a)) <= _DET_TOL:
        raise DegenerateFrameError("linjet action needs an invertible frame")
    _check_compatible(A, g, w.e, tol)
    lv = vertical_matrix(A, g, w.e)
    e2 = act(A, g, w.e, tol)
    return LinJet(e2, lv @ w.w @ np.linalg.inv(a))


def act_extended_cojet(A, u, z, tol=COMPAT_TOL):
    """Induced action on the twisted affine dual, defined by
    <u.z, w> = det(frame(u))^-1 <z, u^-1.w> for jets w at the image
    point.  The pairing is affine in the jet's fiber block, so (P', c')
    is read off from the action of the inverse jet on basis jets."""
    _check_compatible(A, u.g, z.e, tol)
    n, k = A.E.base.dim, A.E.fiber_dim
    a = frame_of(u)
    det = np.linalg.det(a)
    if abs(det) <= _DET_TOL:
        raise DegenerateFrameError("cojet action needs an invertible frame")
    e2 = act(A, u.g, z.e, tol)
    u_inv = jg_invert(A.G, u)
    w0 = act_jet(A, u_inv, jet_from_fiber_block(e2, np.zeros((k, n))), tol)
    c2 = (float(np.sum(z.P * w0.fiber_block)) + z.c) / det
    P2 = np.empty((k, n))
    for b in range(k):
        for nu in range(n):
            blk = np.zeros((k, n))
            blk[b, nu] = 1.0
            wb = act_jet(A, u_inv, jet_from_fiber_block(e2, blk), tol)
            P2[b, nu] = (float(np.sum(z.P * wb.fiber_block)) + z.c) / det \
                - c2
    return ExtendedCojetPoint(e2[:n], e2[n:], P2, c2)


def act_ordinary_cojet(A, a, g, z, tol=COMPAT_TOL):
    """Induced action on the twisted linear dual:
    P' = det(a)^-1 Lv^-T P a^T, the linear part of the extended case."""
    a = np.asarray(a, dtype=float)
    det = np.linalg.det(a)
    if abs(det) <= _DET_TOL:
        raise DegenerateFrameError("cojet action needs an invertible frame")
    _check_compatible(A, g, z.e, tol)
    n = A.E.base.dim
    lv = vertical_matrix(A, g, z.e)
    e2 = act(A, g, z.e, tol)
    P2 = np.linalg.inv(lv).T @ z.P @ a.T / det
    return OrdinaryCojetPoint(e2[:n], e2[n:], P2)


def tangent_matrix(A, u, e, tol=COMPAT_TOL):
    """The linear map L_u on T_eE realizing the jet-groupoid action on
    tangent vectors: u.v = T Phi((u o T pi)(v), v)."""
    _check_compatible(A, u.g, e, tol)
    n = A.E.base.dim
    d = A.E.total_dim
    jac = action_jacobian(A, u.g, e)
    p_base = np.zeros((n, d))
    p_base[:, :n] = np.eye(n)
    return jac @ np.vstack([u.U @ p_base, np.eye(d)])


def act_tangent(A, u, v_e, tol=COMPAT_TOL):
    """Tangent action: (e, v) maps to (Phi(g, e), L_u v)."""
    e, v = v_e
    L = tangent_matrix(A, u, e, tol)
    return act(A, u.g, e, tol), L @ np.asarray(v, dtype=float)


def _apply_contra(comp, L, axis):
    moved = np.tensordot(L, comp, axes=([1], [axis]))
    return np.moveaxis(moved, 0, axis)


def act_tensor(A, u, t, tol=COMPAT_TOL):
    """Tensor action: contravariant slots by L_u, covariant by L_u^-1,
    so that (u.t)(u.v_1, ...) = t(v_1, ...)."""
    L = tangent_matrix(A, u, t.e, tol)
    if abs(np.linalg.det(L)) <= _DET_TOL:
        raise DegenerateFrameError("tensor action needs invertible L_u")
    Li = np.linalg.inv(L)
    comp = t.components
    for axis in range(t.r):
        comp = _apply_contra(comp, L, axis)
    for axis in range(t.r, t.r + t.s):
        # alpha'_i = alpha_j (L^-1)_{j i}
        comp = _apply_contra(comp, Li.T, axis)
    return TensorPoint(act(A, u.g, t.e, tol), t.r, t.s, comp)


def act_form(A, u, alpha, tol=COMPAT_TOL):
    """Specialization of the tensor action to covariant (form) points."""
    if alpha.r != 0:
        raise CompositionError("act_form expects a purely covariant tensor")
    return act_tensor(A, u, alpha, tol)


def _jet_of(A, beta, x):
    """A JetElement over beta(x): a bisection is prolonged (holonomous
    case); a callable x -> JetElement is used directly."""
    if isinstance(beta, Bisection):
        return jet_of_bisection(A.G, beta, x)
    return beta(np.asarray(x, dtype=float))


def apply_bisection(A, beta, space, point, tol=COMPAT_TOL):
    """Representation of the bisection group on each induced space.

    ``space``: "E" or "VE" take a bisection of G; "TE", "tensor",
    "extended_cojet" and "ordinary_cojet" take either a bisection of G
    (acting through its jet prolongation) or a callable x -> JetElement.
    Points: "E" a bundle point, "VE"/"TE" a pair (e, v), "tensor" a
    TensorPoint, cojet spaces their respective point types.
    """
    n = A.E.base.dim

    def g_at(e):
        return np.asarray(beta(np.asarray(e, dtype=float)[:n]),
                          dtype=float)

    if space == "E":
        return act(A, g_at(point), point, tol)
    if space == "VE":
        return act_vertical(A, g_at(point[0]), point, tol)
    if space == "TE":
        u = _jet_of(A, beta, np.asarray(point[0], dtype=float)[:n])
        return act_tangent(A, u, point, tol)
    if space == "tensor":
        u = _jet_of(A, beta, point.e[:n])
        return act_tensor(A, u, point, tol)
    if space == "extended_cojet":
        u = _jet_of(A, beta, point.x)
        return act_extended_cojet(A, u, point, tol)
    if space == "ordinary_cojet":
        u = _jet_of(A, beta, point.x)
        return act_ordinary_cojet(A, frame_of(u), u.g, point, tol)
    raise CompositionError("unknown representation space %r" % space)


def fundamental_vector_field(A, alg, xi, e):
    """X_E(e) = d/dt Phi(exp(t xi)(x), e)|_0, computed algebraically as
    the g-block of T Phi at (1_x, e) applied to the tangent-at-unit
    realization of xi."""
    e = np.asarray(e, dtype=float)
    x = e[:A.E.base.dim]
    g1 = np.asarray(A.G.unit.eval(x), dtype=float)
    v = np.asarray(alg.realize(xi).eval(x), dtype=float)
    jac = action_jacobian(A, g1, e)[:, :A.G.dim]
    return jac @ v


def check_tensor_invariance(A, tensor_field, mode, sampler, n_samples=100,
                            seed=0):
    """Invariance report for a tensor field e -> TensorPoint.

    pointwise mode: ``sampler(rng)`` yields compatible (JetElement, e)
    pairs; the residual is |u.t(e) - t(Phi(g, e))| per sample.
    bisection mode: ``sampler(rng)`` yields (bisection-like, e); the
    push-forward through the jet of the bisection is compared the same
    way ("sampled-family invariance": a finite generating family stands
    in for the full bisection group).
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    argmax = None
    for _ in range(n_samples):
        thing, e = sampler(rng)
        if mode == "pointwise":
            u = thing
        elif mode == "bisection":
            u = _jet_of(A, thing, np.asarray(e, dtype=float)[:A.E.base.dim])
        else:
            raise CompositionError("unknown invariance mode %r" % mode)
        t = tensor_field(e)
        pushed = act_tensor(A, u, t)
        res = float(np.max(np.abs(
            pushed.components - tensor_field(pushed.e).components)))
        if res > worst:
            worst, argmax = res, np.asarray(e, dtype=float).tolist()
    return {
        "property": "tensor_invariance[%s]" % mode,
        "n_samples": int(n_samples),
        "max_residual": worst,
        "argmax_sample": argmax,
    }


# ---------------------------------------------------------------------------
# built-in actions


def transport_action(G, E):
    """Trivial transport of the pair groupoid: (y, x) . (x, f) = (y, f)."""
    n, k, N = E.base.dim, E.fiber_dim, G.dim
    if N != 2 * n:
        raise CompositionError("transport action needs a pair groupoid")
    return ActionChart(
        G, E,
        SmoothMap(N + n + k, n + k,
                  lambda ge: list(ge[:n]) + list(ge[N + n:]),
                  name="transport"),
        name="transport")


def frame_transport_action(G, E):
    """Base transport of a frame-type groupoid (y, x, A row-major):
    the element moves the base point, fiber components ride along."""
    n, k, N = E.base.dim, E.fiber_dim, G.dim
    if N != 2 * n + n * n:
        raise CompositionError(
            "frame transport needs a frame-layout groupoid")
    return ActionChart(
        G, E,
        SmoothMap(N + n + k, n + k,
                  lambda ge: list(ge[:n]) + list(ge[N + n:]),
                  name="frame_transport"),
        name="frame_transport")


def rotation_action(G, E):
    """SO(2) group bundle rotating a 2-dimensional fiber."""
    n, k, N = E.base.dim, E.fiber_dim, G.dim
    if N != n + 1 or k != 2:
        raise CompositionError(
            "rotation action needs an SO(2) bundle and a 2-d fiber")

    def body(ge):
        th = ge[n]
        f1, f2 = ge[N + n], ge[N + n + 1]
        c, s = dual.cos(th), dual.sin(th)
        return list(ge[:n]) + [c * f1 - s * f2, s * f1 + c * f2]

    return ActionChart(G, E, SmoothMap(N + n + k, n + k, body,
                                       name="rotation"),
                       name="rotation")


_BUILTIN_ACTIONS = {
    "transport": transport_action,
    "frame_transport": frame_transport_action,
    "rotation": rotation_action,
}


def builtin_action(name, G, E):
    try:
        ctor = _BUILTIN_ACTIONS[name]
    except KeyError:
        raise CompositionError("unknown action kind %r" % name) from None
    return ctor(G, E)


# ---------------------------------------------------------------------------
# compatible-pair samplers


def element_with_source(G, g, x):
    """Overwrite the source coordinates of ``g`` so that sigma(g) = x.

    Valid for charts whose source map is a coordinate projection (all
    built-ins); for metric subgroupoids this preserves membership when
    the metric field is constant.
    """
    g = np.array(g, dtype=float)
    x = np.asarray(x, dtype=float)
    ts = to_float(G.sigma.jacobian(g))
    for i in range(ts.shape[0]):
        cols = np.flatnonzero(ts[i] != 0.0)
        if len(cols) != 1 or ts[i, cols[0]] != 1.0:
            raise CompositionError(
                "source map of %s is not a coordinate projection" % G.name)
        g[cols[0]] = x[i]
    return g


def sample_compatible_pair(A, rng):
    """A compatible (g, e) sample for an action chart."""
    e = box_sampler(A.E.total_box, rng, margin=0.05)
    g = element_with_source(A.G, A.G.sample_element(rng),
                            e[:A.E.base.dim])
    return g, e


def sample_compatible_jet(A, rng, spread=0.4):
    """A compatible (JetElement, e) sample for an action chart."""
    g, e = sample_compatible_pair(A, rng)
    return sample_jet_element(A.G, rng, spread=spread, g=g), e


def second_order_cojet_map(A, s):
    """Point map of the extended multiphase space induced by a
    second-order jet element ``s``.

    The first-order Taylor data (dg, dU) of ``s`` extends the underlying
    jet element to a JG-valued section near its source point, so the
    cojet action is defined on a whole neighborhood in Lambda-coordinates
    (x, y, P row-major, c); that is exactly what a tangent map of the
    action needs.  Returns a callable on flattened Lambda coordinates.
    """
    n, k = A.E.base.dim, A.E.fiber_dim
    x0 = np.asarray(A.G.sigma.eval(s.g), dtype=float)

    def point_map(zc):
        zc = np.asarray(zc, dtype=float)
        dx = zc[:n] - x0
        u = JetElement(A.G, s.g + s.dg @ dx, s.U + s.dU @ dx)
        z = ExtendedCojetPoint(zc[:n], zc[n:n + k],
                               zc[n + k:n + k + k * n].reshape(k, n),
                               zc[n + k + k * n])
        return act_extended_cojet(A, u, z).coords()

    return point_map
