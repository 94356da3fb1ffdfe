"""Lie algebroids in a chart: structure functions, brackets with the
Leibniz rule, the jet algebroid, the algebroid of a groupoid, and the
exponential map.

A rank-r algebroid over an n-dimensional base is encoded by structure
functions: the anchor components f[a, mu](x) and the bracket components
f[a, b, c](x) with [T_a, T_b] = f[a, b, c] T_c.  The induced basis of the
jet algebroid is ordered (T_a, then T_a^mu with index r + a*n + mu).
"""

import numpy as np

from gnk import dual
from gnk.errors import OutOfDomainError, RankDropError
from gnk.linal import kernel_basis, mdot, to_float
from gnk.smooth import SmoothMap

__all__ = [
    "StructureFunctions", "AlgebroidSection", "anchor_apply", "bracket",
    "jet_algebroid", "jet_prolong_section", "jacobi_residual",
    "GroupoidAlgebroid", "algebroid_of_groupoid", "exponential",
    "sections_with_prolongation_in", "killing_jet_predicate",
    "tangent_algebroid", "so3_bundle_algebroid",
]


class StructureFunctions:
    """Chartwise algebroid data: anchor f[a, mu] and bracket f[a, b, c]."""

    def __init__(self, base, rank, anchor_map, bracket_map, name="g"):
        self.base = base
        self.rank = int(rank)
        self.anchor_map = anchor_map      # SmoothMap n -> r*n (row-major)
        self.bracket_map = bracket_map    # SmoothMap n -> r*r*r (row-major)
        self.name = name

    @classmethod
    def constant(cls, base, anchor, brack, name="g"):
        anchor = np.asarray(anchor, dtype=float)
        brack = np.asarray(brack, dtype=float)
        r = anchor.shape[0]
        n = base.dim
        a_flat = list(anchor.ravel())
        b_flat = list(brack.ravel())
        return cls(
            base, r,
            SmoothMap(n, r * n, lambda x: list(a_flat), name="anchor"),
            SmoothMap(n, r * r * r, lambda x: list(b_flat), name="bracket"),
            name=name)

    def anchor_at(self, x):
        return np.asarray(self.anchor_map.eval(x)).reshape(
            self.rank, self.base.dim)

    def bracket_at(self, x):
        r = self.rank
        return np.asarray(self.bracket_map.eval(x)).reshape(r, r, r)

    def __repr__(self):
        return "StructureFunctions(%s, rank=%d)" % (self.name, self.rank)


class AlgebroidSection:
    """A section given by its coefficients against the chart basis."""

    def __init__(self, coeffs, name="xi"):
        self.coeffs = coeffs  # SmoothMap n -> r
        self.name = name

    @classmethod
    def constant(cls, base, values, name="xi"):
        values = [float(v) for v in values]
        return cls(SmoothMap(base.dim, len(values), lambda x: list(values),
                             name=name), name=name)

    def __call__(self, x):
        return self.coeffs.eval(x)


def anchor_apply(S, xi, x):
    """The vector field alpha(xi) at x: sum_a xi^a f[a, mu]."""
    return np.asarray(xi(x)) @ S.anchor_at(x)


def anchor_field(S, xi):
    """alpha(xi) as a SmoothMap (dual-number safe)."""
    n, r = S.base.dim, S.rank
    a_body, c_body = S.anchor_map.body, xi.coeffs.body

    def body(x):
        fa = a_body(list(x))
        cf = c_body(list(x))
        return [sum(cf[a] * fa[a * n + mu] for a in range(r))
                for mu in range(n)]

    return SmoothMap(n, n, body, name="anchor(%s)" % xi.name)


def bracket(S, xi, eta):
    """[xi, eta] per the structure functions plus Leibniz derivative
    terms: f-term + L_{alpha(xi)} eta - L_{alpha(eta)} xi."""
    n, r = S.base.dim, S.rank
    a_body = S.anchor_map.body
    b_body = S.bracket_map.body
    xi_body, eta_body = xi.coeffs.body, eta.coeffs.body

    def body(x):
        xs = list(x)
        xv = xi_body(xs)
        ev = eta_body(xs)
        fa = a_body(xs)
        fb = b_body(xs)
        ax = [sum(xv[a] * fa[a * n + mu] for a in range(r))
              for mu in range(n)]
        ae = [sum(ev[a] * fa[a * n + mu] for a in range(r))
              for mu in range(n)]
        dxi = dual.jacobian(xi_body, xs, r)
        deta = dual.jacobian(eta_body, xs, r)
        out = []
        for c in range(r):
            acc = 0.0
            for a in range(r):
                for b in range(r):
                    f = fb[(a * r + b) * r + c]
                    if isinstance(f, float) and f == 0.0:
                        continue
                    acc = acc + xv[a] * ev[b] * f
            for u in range(n):
                acc = acc + ax[u] * deta[c, u] - ae[u] * dxi[c, u]
            out.append(acc)
        return out

    return AlgebroidSection(SmoothMap(n, r, body, name="bracket"),
                            name="[%s,%s]" % (xi.name, eta.name))


def jet_algebroid(S):
    """The jet algebroid: rank r + r*n, structure functions assembled
    from f, df (basis ordered T_a then T_a^mu)."""
    n, r = S.base.dim, S.rank
    R = r + r * n
    a_body = S.anchor_map.body
    b_body = S.bracket_map.body

    def anchor_body(x):
        fa = a_body(list(x))
        return list(fa) + [0.0] * (r * n * n)

    def idx(a, mu):
        return r + a * n + mu

    def bracket_body(x):
        xs = list(x)
        fb = b_body(xs)
        fa = a_body(xs)
        dfb = dual.jacobian(b_body, xs, r * r * r)
        dfa = dual.jacobian(a_body, xs, r * n)
        F = np.zeros((R, R, R), dtype=object)
        F[:] = 0.0
        for a in range(r):
            for b in range(r):
                for c in range(r):
                    f = fb[(a * r + b) * r + c]
                    # [T_a, T_b] = f_ab^c T_c + d_mu f_ab^c T_c^mu
                    F[a, b, c] = F[a, b, c] + f
                    for mu in range(n):
                        F[a, b, idx(c, mu)] = F[a, b, idx(c, mu)] \
                            + dfb[(a * r + b) * r + c, mu]
        for a in range(r):
            for b in range(r):
                for mu in range(n):
                    # [T_a, T_b^mu] = f_ab^c T_c^mu + d_nu f_a^mu T_b^nu
                    for c in range(r):
                        f = fb[(a * r + b) * r + c]
                        F[a, idx(b, mu), idx(c, mu)] = \
                            F[a, idx(b, mu), idx(c, mu)] + f
                    for nu in range(n):
                        F[a, idx(b, mu), idx(b, nu)] = \
                            F[a, idx(b, mu), idx(b, nu)] \
                            + dfa[a * n + mu, nu]
        for a in range(r):
            for b in range(r):
                for mu in range(n):
                    for nu in range(n):
                        # [T_a^mu, T_b^nu] = f_a^nu T_b^mu - f_b^mu T_a^nu
                        # (the unique antisymmetric bracket consistent with
                        # the Leibniz rule and j preserving brackets)
                        F[idx(a, mu), idx(b, nu), idx(b, mu)] = \
                            F[idx(a, mu), idx(b, nu), idx(b, mu)] \
                            + fa[a * n + nu]
                        F[idx(a, mu), idx(b, nu), idx(a, nu)] = \
                            F[idx(a, mu), idx(b, nu), idx(a, nu)] \
                            - fa[b * n + mu]
        # antisymmetrize the mixed block
        for a in range(r):
            for B in range(r, R):
                for C in range(R):
                    F[B, a, C] = -F[a, B, C]
        return [F[i, j, k] for i in range(R) for j in range(R)
                for k in range(R)]

    return StructureFunctions(
        S.base, R,
        SmoothMap(n, R * n, anchor_body, name="jet_anchor"),
        SmoothMap(n, R * R * R, bracket_body, name="jet_bracket"),
        name="J(%s)" % S.name)


def jet_prolong_section(S, xi):
    """j xi = xi^a T_a + d_mu xi^a T_a^mu."""
    n, r = S.base.dim, S.rank
    xi_body = xi.coeffs.body

    def body(x):
        xs = list(x)
        v = xi_body(xs)
        d = dual.jacobian(xi_body, xs, r)
        return list(v) + [d[a, mu] for a in range(r) for mu in range(n)]

    return AlgebroidSection(SmoothMap(n, r + r * n, body, name="j"),
                            name="j%s" % xi.name)


def jacobi_residual(S, xi, eta, zeta, x):
    """Max-abs cyclic Jacobi sum at a point."""
    s1 = bracket(S, bracket(S, xi, eta), zeta)
    s2 = bracket(S, bracket(S, eta, zeta), xi)
    s3 = bracket(S, bracket(S, zeta, xi), eta)
    return float(np.max(np.abs(s1(x) + s2(x) + s3(x))))


# ---------------------------------------------------------------------------
# the algebroid of a groupoid


class GroupoidAlgebroid:
    """The Lie algebroid of a groupoid chart: kernel of T sigma along the
    units, with anchor T tau and bracket via right-invariant extensions.

    Restricted to groupoid charts whose source Jacobian is constant (true
    for all built-ins, where sigma is a coordinate projection), so the
    kernel basis can be chosen once, deterministically, for the whole
    chart.
    """

    def __init__(self, G):
        self.G = G
        base = G.base
        x0 = base.box.mean(axis=1)
        ts0 = to_float(G.sigma.jacobian(G.unit.eval(x0)))
        # verify constancy at a few more points
        probe = np.linspace(0.1, 0.9, 3)
        for t in probe:
            x = base.box[:, 0] + t * (base.box[:, 1] - base.box[:, 0])
            ts = to_float(G.sigma.jacobian(G.unit.eval(x)))
            if np.max(np.abs(ts - ts0)) > 1e-12:
                raise RankDropError(
                    "algebroid extraction needs a constant source Jacobian")
        self.basis = kernel_basis(ts0)        # N x r, constant
        self.rank = self.basis.shape[1]
        self.base = base

    def realize(self, xi):
        """The tangent-at-unit realization x -> N-vector B xi(x)."""
        B = self.basis
        xi_body = xi.coeffs.body
        N, r = B.shape

        def body(x):
            cf = xi_body(list(x))
            return [sum(B[i, a] * cf[a] for a in range(r) if B[i, a] != 0.0)
                    for i in range(N)]

        return SmoothMap(self.base.dim, N, body, name="realize")

    def right_invariant(self, xi):
        """The right-invariant field X^r(g) = T(mu(., g)) X(tau(g))."""
        G = self.G
        N = G.dim
        real_body = self.realize(xi).body
        tau_body, mu_body = G.tau.body, G.mu.body

        def body(g):
            gs = list(g)
            x = tau_body(gs)
            v = real_body(list(x))
            unit_x = G.unit.body(list(x))
            # derivative of h -> mu(h, g) at the unit over tau(g)
            jac = dual.jacobian(lambda h: mu_body(list(h) + gs),
                                list(unit_x), N)
            return list(mdot(jac, np.asarray(v, dtype=object)))

        return SmoothMap(N, N, body, name="rightinv")

    def bracket_coeffs(self, xi, eta):
        """Coefficients of [xi, eta] via the AD commutator of the
        right-invariant extensions, decomposed in the kernel basis."""
        Xb = self.right_invariant(xi).body
        Yb = self.right_invariant(eta).body
        B = self.basis
        unit_body = self.G.unit.body
        N = self.G.dim

        def body(x):
            u = unit_body(list(x))
            xv = Xb(list(u))
            yv = Yb(list(u))
            dX = dual.jacobian(Xb, list(u), N)
            dY = dual.jacobian(Yb, list(u), N)
            comm = mdot(dY, np.asarray(xv, dtype=object)) \
                - mdot(dX, np.asarray(yv, dtype=object))
            # basis columns are orthonormal, so coefficients are B^T comm
            return list(mdot(B.T, comm))

        return AlgebroidSection(
            SmoothMap(self.base.dim, self.rank, body, name="gbracket"),
            name="[%s,%s]" % (xi.name, eta.name))

    def structure_functions(self):
        """Extract (f_a^mu, f_ab^c) against the constant kernel basis."""
        G, B = self.G, self.basis
        n, r = self.base.dim, self.rank
        unit_body, tau_body = G.unit.body, G.tau.body

        def anchor_body(x):
            u = unit_body(list(x))
            tt = dual.jacobian(tau_body, list(u), n)
            a = mdot(tt, B)   # n x r
            return [a[mu, b] for b in range(r) for mu in range(n)]

        basis_sections = [
            AlgebroidSection.constant(self.base, np.eye(r)[a],
                                      name="T%d" % a)
            for a in range(r)]
        brackets = [[self.bracket_coeffs(basis_sections[a],
                                         basis_sections[b])
                     for b in range(r)] for a in range(r)]

        def bracket_body(x):
            out = []
            for a in range(r):
                for b in range(r):
                    cf = brackets[a][b].coeffs.body(list(x))
                    out.extend(cf)
            return out

        return StructureFunctions(
            self.base, r,
            SmoothMap(n, r * n, anchor_body, name="anchor"),
            SmoothMap(n, r * r * r, bracket_body, name="bracket"),
            name="Lie(%s)" % G.name)


def algebroid_of_groupoid(G):
    return GroupoidAlgebroid(G)


def exponential(alg, xi, t, x, steps_per_unit=200):
    """exp(t xi)(x): RK4 flow of the right-invariant field from 1_x."""
    G = alg.G
    field = alg.right_invariant(xi)
    g = np.asarray(G.unit.eval(x), dtype=float)
    nsteps = max(1, int(np.ceil(steps_per_unit * abs(t))))
    h = t / nsteps

    def f(gv):
        return np.asarray([float(v) for v in field.body(list(gv))])

    for _ in range(nsteps):
        k1 = f(g)
        k2 = f(g + 0.5 * h * k1)
        k3 = f(g + 0.5 * h * k2)
        k4 = f(g + h * k3)
        g = g + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(g)):
            raise OutOfDomainError("exponential flow diverged")
        tau = G.tau.eval(g)
        if not G.base.contains(tau, tol=1e-6):
            raise OutOfDomainError("exponential flow left the chart")
    return g


# ---------------------------------------------------------------------------
# distinguished section spaces


def sections_with_prolongation_in(S, predicate, xi, points):
    """True iff the prolonged coefficients of xi satisfy the predicate at
    every sample point (the gate defining Gamma(g, g-tilde))."""
    jxi = jet_prolong_section(S, xi)
    for x in points:
        if not predicate(np.asarray(x, dtype=float), jxi(x)):
            return False
    return True


def killing_jet_predicate(metric, tol=1e-8):
    """Predicate on jet-algebroid coefficients of a tangent-algebroid
    section (r = n): the first-order part solves the Killing equation
    G dX + (dX)^T G + X . dG = 0 for the metric field."""
    const = not callable(metric)
    if const:
        m = np.asarray(metric, dtype=float)

    def pred(x, coeffs):
        n = len(x)
        v = coeffs[:n]
        d = np.asarray(coeffs[n:]).reshape(n, n)
        g = m if const else metric(x)
        res = g @ d + d.T @ g
        if not const:
            h = 1e-6
            for mu in range(n):
                dx = np.zeros(n)
                dx[mu] = h
                res += v[mu] * (metric(x + dx) - metric(x - dx)) / (2 * h)
        return bool(np.max(np.abs(res)) <= tol)

    return pred


def tangent_algebroid(base):
    """Structure functions of TM: anchor identity, bracket zero."""
    n = base.dim
    return StructureFunctions.constant(
        base, np.eye(n), np.zeros((n, n, n)), name="TM")


def so3_bundle_algebroid(base):
    """The trivial bundle M x so(3): zero anchor, epsilon bracket."""
    eps = np.zeros((3, 3, 3))
    for a, b, c in [(0, 1, 2), (1, 2, 0), (2, 0, 1)]:
        eps[a, b, c] = 1.0
        eps[b, a, c] = -1.0
    return StructureFunctions.constant(
        base, np.zeros((3, base.dim)), eps, name="Mxso3")
