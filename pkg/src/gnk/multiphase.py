"""Extended and ordinary multiphase spaces and their canonical forms.

The extended multiphase space has coordinates (x, y, P[a, mu], c); the
isomorphic space of 1-horizontal n-forms on E carries

    theta = P[a, mu] dy^a ^ d^n x_mu  +  c d^n x
    omega = -d theta = dy^a ^ dP[a, mu] ^ d^n x_mu  -  dc ^ d^n x

with d^n x_mu = i_{d_mu}(dx^1 ^ ... ^ dx^n).  A Hamiltonian is a section
(x, y, P) -> (x, y, P, -h); theta_H and omega_H are pullbacks along it.
Lagrangians are densities on jet coordinates; the Legendre transform and
the Newton-inverted De Donder--Weyl Hamiltonian connect the two sides.
"""

import numpy as np

from gnk import dual
from gnk.actions import act_extended_cojet, act_jet
from gnk.errors import (CompositionError, GridError, NewtonError,
                        NotHyperregularError)
from gnk.jet_bundle import (ExtendedCojetPoint, Jet, OrdinaryCojetPoint,
                            jet_from_fiber_block, linear_part)
from gnk.jet_groupoid import frame_of
from gnk.linal import ginv, mdot, to_float
from gnk.smooth import SmoothMap

__all__ = [
    "HorizontalFormPoint", "Lagrangian", "Hamiltonian",
    "cojet_form_iso", "form_cojet_iso", "theta_eval", "omega_eval",
    "theta_H_eval", "omega_H_eval", "legendre_full", "legendre_linear",
    "dedonder_hamiltonian", "action_functional",
    "euler_lagrange_residual", "dedonder_weyl_residual",
    "check_lagrangian_invariance", "check_hamiltonian_invariance",
    "builtin_lagrangian",
]


class HorizontalFormPoint:
    """A 1-horizontal n-form at a bundle point: coefficient ``c`` of the
    coordinate volume form and ``P[a, mu]`` of dy^a ^ d^n x_mu."""

    def __init__(self, e, P, c):
        self.e = np.asarray(e, dtype=float)
        self.P = np.asarray(P, dtype=float)
        self.c = float(c)
        self.k, self.n = self.P.shape

    def __repr__(self):
        return "HorizontalFormPoint(e=%s, P=%s, c=%g)" % (
            self.e, self.P.tolist(), self.c)

    def eval(self, vectors):
        """Evaluate as an n-form on n tangent vectors of E."""
        return horizontal_form_value(self.n, self.k, self.P, self.c,
                                     vectors)


def horizontal_form_value(n, k, P, c, vectors):
    """(P[a,mu] dy^a ^ d^n x_mu + c d^n x)(v_1, ..., v_n).

    dy^a ^ d^n x_mu equals the coordinate volume form with dx^mu
    replaced by dy^a, so each term is a determinant of base components
    with one row swapped for fiber components.
    """
    vs = [np.asarray(v, dtype=float) for v in vectors]
    if len(vs) != n:
        raise CompositionError("an n-form needs exactly n vectors")
    X = np.stack([v[:n] for v in vs], axis=1)   # rows: dx^i, cols: vectors
    total = c * np.linalg.det(X)
    for a in range(k):
        ya = np.array([v[n + a] for v in vs])
        for mu in range(n):
            Xs = X.copy()
            Xs[mu] = ya
            total += P[a, mu] * np.linalg.det(Xs)
    return float(total)


def cojet_form_iso(z):
    """Canonical isomorphism: extended cojet point -> n-form point."""
    return HorizontalFormPoint(z.e, z.P, z.c)


def form_cojet_iso(alpha):
    """Inverse of :func:`cojet_form_iso`."""
    n = alpha.n
    return ExtendedCojetPoint(alpha.e[:n], alpha.e[n:], alpha.P, alpha.c)


# ---------------------------------------------------------------------------
# theta and omega on the extended multiphase space
#
# Lambda-coordinates: (x, y, P row-major, c), dim n + k + k*n + 1.


def _lambda_dims(alpha):
    return alpha.P.shape[1], alpha.P.shape[0]


def theta_eval(alpha, vectors):
    """Tautological n-form at alpha: push each vector to T_eE by the
    projection Lambda -> E, then evaluate alpha."""
    n, k = _lambda_dims(alpha)
    d = n + k
    pushed = [np.asarray(w, dtype=float)[:d] for w in vectors]
    return horizontal_form_value(n, k, alpha.P, alpha.c, pushed)


def _monomial(rows, vectors):
    m = np.array([[v[r] for v in vectors] for r in rows])
    return np.linalg.det(m)


def omega_eval(alpha, vectors):
    """omega = dy^a ^ dP[a,mu] ^ d^n x_mu - dc ^ d^n x on n+1 vectors
    tangent to the extended multiphase space."""
    n, k = _lambda_dims(alpha)
    vs = [np.asarray(w, dtype=float) for w in vectors]
    if len(vs) != n + 1:
        raise CompositionError("omega needs exactly n+1 vectors")
    ic = n + k + k * n
    total = -_monomial([ic] + list(range(n)), vs)
    for a in range(k):
        for mu in range(n):
            rows = [n + a, n + k + a * n + mu] \
                + [i for i in range(n) if i != mu]
            total += (-1.0) ** mu * _monomial(rows, vs)
    return float(total)


# ---------------------------------------------------------------------------
# Lagrangians and Hamiltonians


class Lagrangian:
    """A Lagrangian density on jet coordinates (x, y, v[a, mu])."""

    def __init__(self, E, ell, name="L"):
        self.E = E
        self.ell = ell
        self.name = name

    def value(self, u):
        return float(np.asarray(self.ell.eval(u.coords()))[0])

    def value_at(self, coords):
        return float(np.asarray(self.ell.eval(coords))[0])

    def hyperregular(self, rng, samples=10, tol=1e-9):
        """Certificate: the fiber Hessian d^2 ell / dv^2 is invertible at
        random jet coordinates in the chart box."""
        from gnk.smooth import box_sampler
        n, k = self.E.base.dim, self.E.fiber_dim
        body = self.ell.body
        for _ in range(samples):
            e = box_sampler(self.E.total_box, rng, margin=0.05)
            v = rng.uniform(-1.0, 1.0, k * n)
            z = np.concatenate([e, v])

            def grad(vv):
                c = list(z[:n + k]) + list(vv)
                row = dual.jacobian(body, c, 1)[0]
                return list(row[n + k:])

            hess = to_float(dual.jacobian(grad, list(v), k * n))
            if abs(np.linalg.det(hess)) < tol:
                return False
        return True


class Hamiltonian:
    """A Hamiltonian: scalar h(x, y, P); as a section of the projection
    from the extended to the ordinary multiphase space it is
    (x, y, P) -> (x, y, P, -h)."""

    def __init__(self, E, h, name="H"):
        self.E = E
        self.h = h
        self.name = name
        d0 = h.dom_dim
        h_body = h.body
        self.section = SmoothMap(
            d0, d0 + 1, lambda z: list(z) + [-h_body(list(z))[0]],
            name="%s.section" % name)

    def value(self, z):
        return float(np.asarray(self.h.eval(z.coords()))[0])

    def section_point(self, z):
        return ExtendedCojetPoint(z.x, z.y, z.P, -self.value(z))


def theta_H_eval(H, z, vectors):
    """theta_H = (section of H)^* theta at the ordinary point z."""
    jac = to_float(H.section.jacobian(z.coords()))
    pushed = [jac @ np.asarray(w, dtype=float) for w in vectors]
    return theta_eval(H.section_point(z), pushed)


def omega_H_eval(H, z, vectors):
    """omega_H = (section of H)^* omega at the ordinary point z."""
    jac = to_float(H.section.jacobian(z.coords()))
    pushed = [jac @ np.asarray(w, dtype=float) for w in vectors]
    return omega_eval(H.section_point(z), pushed)


# ---------------------------------------------------------------------------
# Legendre transforms


def legendre_full(L, u):
    """P = d ell / dv at u, c = ell(u) - P.v (extended Legendre map)."""
    n, k = L.E.base.dim, L.E.fiber_dim
    coords = u.coords()
    row = to_float(dual.jacobian(L.ell.body, list(coords), 1))[0]
    P = row[n + k:].reshape(k, n)
    v = u.fiber_block
    c = L.value(u) - float(np.sum(P * v))
    return ExtendedCojetPoint(u.e[:n], u.e[n:], P, c)


def legendre_linear(L, u):
    """The ordinary (fiber-derivative) Legendre map: drop c."""
    return linear_part(legendre_full(L, u))


def _v_gradient(L, n, k):
    body = L.ell.body

    def grad(e, v):
        row = dual.jacobian(body, list(e) + list(v), 1)[0]
        return list(row[n + k:])

    return grad


def dedonder_hamiltonian(L, rng=None, max_iter=50, tol=1e-12):
    """H = FL o (vec FL)^-1 for a hyperregular Lagrangian.

    h(x, y, P) = P.v* - ell(v*) with v*(P) solving P = d ell / dv by
    Newton from v = 0 (one step, i.e. an exact linear solve, when ell is
    quadratic in v).  The body is dual-number safe: dual inputs converge
    the float part first and then take a few Newton steps in dual
    arithmetic.
    """
    n, k = L.E.base.dim, L.E.fiber_dim
    if rng is not None and not L.hyperregular(rng):
        raise NotHyperregularError(
            "%s fails the hyperregularity certificate" % L.name)
    kn = k * n
    grad = _v_gradient(L, n, k)
    ell_body = L.ell.body

    def solve_float(e, P):
        v = np.zeros(kn)
        for _ in range(max_iter):
            r = np.asarray(to_float(np.asarray(grad(e, list(v)),
                                               dtype=object))) - P
            if np.max(np.abs(r)) < tol:
                return v
            hess = to_float(dual.jacobian(lambda vv: grad(e, vv),
                                          list(v), kn))
            if abs(np.linalg.det(hess)) < 1e-14:
                raise NotHyperregularError("singular fiber Hessian")
            v = v - np.linalg.solve(hess, r)
        raise NewtonError("Legendre inversion did not converge")

    def body(z):
        e, P = list(z[:n + k]), list(z[n + k:])
        plain = all(isinstance(c, (int, float)) for c in z)
        if plain:
            v = list(solve_float(np.asarray(e, dtype=float),
                                 np.asarray(P, dtype=float)))
        else:
            e0 = [dual.real(c) for c in e]
            P0 = np.asarray([dual.real(c) for c in P])
            v = [float(vi) for vi in solve_float(np.asarray(e0), P0)]
            for _ in range(3):
                r = np.asarray(grad(e, v), dtype=object) \
                    - np.asarray(P, dtype=object)
                hess = dual.jacobian(lambda vv: grad(e, vv), v, kn)
                v = list(np.asarray(v, dtype=object) - mdot(ginv(hess), r))
        pv = 0.0
        for i in range(kn):
            pv = pv + P[i] * v[i]
        return [pv - ell_body(e + v)[0]]

    return Hamiltonian(L.E, SmoothMap(n + k + kn, 1, body,
                                      name="h[%s]" % L.name),
                       name="H[%s]" % L.name)


# ---------------------------------------------------------------------------
# action functional and equation-of-motion residuals on grids


def action_functional(L, phi, region=None):
    """Midpoint-rule quadrature of ell(j phi) over the grid region
    (an iterable of node indices; default: all interior nodes)."""
    if region is None:
        region = phi.interior_indices()
    cell = float(np.prod(phi.spacing))
    total = 0.0
    for idx in region:
        total += L.value_at(phi.jet_coords(tuple(idx))) * cell
    return total


def _momentum_field(L, phi):
    """p[a, mu] = d ell / dv at each node's grid jet, as an array."""
    n, k = phi.n, phi.k
    p = np.zeros((k * n,) + phi.shape)
    for idx in np.ndindex(*phi.shape):
        ok = all(phi.periodic[ax] or 0 < idx[ax] < phi.shape[ax] - 1
                 for ax in range(n))
        if not ok:
            continue
        row = to_float(dual.jacobian(L.ell.body,
                                     list(phi.jet_coords(idx)), 1))[0]
        p[(slice(None),) + idx] = row[n + k:]
    return p


def euler_lagrange_residual(L, phi, idx):
    """d ell / dy^a - d/dx^mu (d ell / dv[a, mu]) at an interior node,
    all derivatives centered.  Needs two interior layers."""
    idx = tuple(int(i) for i in idx)
    n, k = phi.n, phi.k
    for ax in range(n):
        if not phi.periodic[ax] and not 1 < idx[ax] < phi.shape[ax] - 2:
            raise GridError("EL residual needs two interior layers")
    row = to_float(dual.jacobian(L.ell.body,
                                 list(phi.jet_coords(idx)), 1))[0]
    dy = row[n:n + k]
    res = dy.copy()
    grad = _v_gradient(L, n, k)
    for mu in range(n):
        for sign in (+1, -1):
            j = list(idx)
            j[mu] += sign
            if phi.periodic[mu]:
                j[mu] %= phi.shape[mu]
            c = phi.jet_coords(tuple(j))
            p = to_float(np.asarray(
                grad(list(c[:n + k]), list(c[n + k:])), dtype=object))
            p = p.reshape(k, n)
            res -= sign * p[:, mu] / (2.0 * phi.spacing[mu])
    return res


def dedonder_weyl_residual(H, phi, idx):
    """De Donder--Weyl residuals at an interior node of a GridSection
    carrying momenta: (d_mu y^a - dh/dP[a,mu],
    sum_mu d_mu P[a,mu] + dh/dy^a)."""
    idx = tuple(int(i) for i in idx)
    if phi.P is None:
        raise GridError("DW residual needs a momentum-carrying section")
    n, k = phi.n, phi.k
    if not phi.is_interior(idx):
        raise GridError("DW residual needs an interior node")
    z = np.concatenate([phi.point(idx), phi.value(idx),
                        phi.P[(slice(None), slice(None)) + idx].ravel()])
    row = to_float(dual.jacobian(H.h.body, list(z), 1))[0]
    dh_dy = row[n:n + k]
    dh_dP = row[n + k:].reshape(k, n)
    r1 = phi.fiber_jet(idx) - dh_dP
    r2 = dh_dy.copy()
    for mu in range(n):
        Pmu = phi.P[:, mu]
        r2 += phi.derivative(idx, mu, arr=Pmu)
    return np.concatenate([r1.ravel(), r2])


# ---------------------------------------------------------------------------
# invariance reports


def check_lagrangian_invariance(L, A, sampler, n_samples=100, seed=0):
    """Report max |ell(u.w) det(frame(u)) - ell(w)| over sampled
    compatible pairs (u, w) from ``sampler(rng)``."""
    rng = np.random.default_rng(seed)
    worst, argmax = 0.0, None
    for _ in range(n_samples):
        u, w = sampler(rng)
        det = np.linalg.det(frame_of(u))
        res = abs(L.value(act_jet(A, u, w)) * det - L.value(w))
        if res > worst:
            worst, argmax = res, w.coords().tolist()
    return {"property": "lagrangian_invariance", "n_samples": n_samples,
            "max_residual": worst, "argmax_sample": argmax}


def check_hamiltonian_invariance(H, A, sampler, n_samples=100, seed=0):
    """Report max |H(u.z) - u.H(z)| (as extended points) over sampled
    compatible pairs (u, z ordinary) from ``sampler(rng)``."""
    rng = np.random.default_rng(seed)
    worst, argmax = 0.0, None
    for _ in range(n_samples):
        u, z = sampler(rng)
        a = frame_of(u)
        z2 = _act_ordinary(A, u, a, z)
        lhs = H.section_point(z2)
        rhs = act_extended_cojet(A, u, H.section_point(z))
        res = float(np.max(np.abs(lhs.coords() - rhs.coords())))
        if res > worst:
            worst, argmax = res, z.coords().tolist()
    return {"property": "hamiltonian_invariance", "n_samples": n_samples,
            "max_residual": worst, "argmax_sample": argmax}


def _act_ordinary(A, u, a, z):
    from gnk.actions import act_ordinary_cojet
    return act_ordinary_cojet(A, a, u.g, z)


# ---------------------------------------------------------------------------
# built-in Lagrangians


def _kg_density(E, mass, metric):
    n, k = E.base.dim, E.fiber_dim
    eta = np.asarray(metric, dtype=float)
    eta_inv = np.linalg.inv(eta)
    m2 = float(mass) ** 2

    def body(c):
        acc = 0.0
        for a in range(k):
            for mu in range(n):
                for nu in range(n):
                    if eta_inv[mu, nu] == 0.0:
                        continue
                    acc = acc + 0.5 * eta_inv[mu, nu] \
                        * c[n + k + a * n + mu] * c[n + k + a * n + nu]
        for a in range(k):
            acc = acc - 0.5 * m2 * c[n + a] * c[n + a]
        return [acc]

    return body


def builtin_lagrangian(name, E, **params):
    """Built-ins: "klein_gordon" (mass, metric), "free_particle"
    (omega: harmonic frequency, 0 = free), "so2_doublet" (mass,
    metric; requires a 2-dimensional fiber)."""
    n, k = E.base.dim, E.fiber_dim
    kn = k * n
    if name == "klein_gordon" or name == "so2_doublet":
        if name == "so2_doublet" and k != 2:
            raise CompositionError("so2_doublet needs a 2-d fiber")
        metric = params.get("metric")
        if metric is None:
            metric = np.diag([1.0] + [-1.0] * (n - 1))
        body = _kg_density(E, params.get("mass", 0.0), metric)
        return Lagrangian(E, SmoothMap(n + k + kn, 1, body, name=name),
                          name=name)
    if name == "free_particle":
        om2 = float(params.get("omega", 0.0)) ** 2

        def body(c):
            acc = 0.0
            for i in range(kn):
                acc = acc + 0.5 * c[n + k + i] * c[n + k + i]
            for a in range(k):
                acc = acc - 0.5 * om2 * c[n + a] * c[n + a]
            return [acc]

        return Lagrangian(E, SmoothMap(n + k + kn, 1, body, name=name),
                          name=name)
    raise CompositionError("unknown lagrangian %r" % name)
