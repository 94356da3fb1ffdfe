"""Momentum maps, Noether currents, and the conservation proof-claims.

A symmetry generator is a pair (xi, chi): a base vector field xi(x) and a
vertical field chi(x, y).  Its holonomous lift to the ordinary multiphase
space (x, y, P) is the fundamental vector field of the induced cojet
action,

    X_lift = (xi, chi, Pdot),
    Pdot[a, mu] = -tr(Dxi) P[a, mu] - (d chi^b/d y^a) P[b, mu]
                  + P[a, nu] d_nu xi^mu,

obtained by differentiating P' = det(a)^-1 Lv^-T P a^T along the flow;
the extended lift adds cdot = -tr(Dxi) c - P[a, mu] d chi^a / d x^mu.

The momentum map is i_{X_lift} theta (extended) or i_{X_lift} theta_H
(ordinary); its pullback along a grid solution is the Noether current
J^mu against d^n x_mu = i_{d_mu}(dx^1 ^ ... ^ dx^n), with divergence
sum_mu d_mu J^mu.  Claim 1 checks L_{X_lift} theta_H = 0 by flowing with
the one-parameter group of the generator (finite differences); claim 2
checks the pullback of i_{X_lift} omega_H along a solution; their sum
reproduces the current divergence via d i_X = L_X - i_X d.
"""

import numpy as np

from gnk import dual
from gnk.algebroid import killing_jet_predicate
from gnk.errors import AdmissibilityError, GridError
from gnk.jet_bundle import OrdinaryCojetPoint
from gnk.linal import to_float
from gnk.multiphase import omega_H_eval, theta_H_eval, theta_eval
from gnk.smooth import SmoothMap

__all__ = [
    "Generator", "CurrentForm", "builtin_generator",
    "check_admissible", "lift_ordinary", "lift_extended",
    "momentum_map", "current_at", "noether_current",
    "current_divergence", "divergence_field",
    "claim1_check", "claim2_check", "proof_decomposition",
    "flow_cojet",
]


class Generator:
    """A symmetry generator: base field xi (n -> n) and vertical field
    chi (n+k -> k).  Optional vectorized grid evaluators speed up
    whole-grid currents; ``seam_safe=False`` marks generators whose
    coefficients are not periodic across a periodic seam (their
    divergence statistics must skip the wrap columns)."""

    def __init__(self, name, xi, chi, xi_grid=None, chi_grid=None,
                 seam_safe=True):
        self.name = name
        self.xi = xi
        self.chi = chi
        self.xi_grid = xi_grid
        self.chi_grid = chi_grid
        self.seam_safe = bool(seam_safe)

    def __repr__(self):
        return "Generator(%s)" % self.name


class CurrentForm:
    """An (n-1)-form on the base at a point: sum_mu J^mu d^n x_mu."""

    def __init__(self, x, components):
        self.x = np.asarray(x, dtype=float)
        self.components = np.asarray(components, dtype=float)

    def __repr__(self):
        return "CurrentForm(x=%s, J=%s)" % (self.x,
                                            self.components.tolist())


# ---------------------------------------------------------------------------
# built-in generators


def _const_xi(vec):
    vec = [float(v) for v in vec]
    n = len(vec)
    return SmoothMap(n, n, lambda x: list(vec), name="const_xi")


def _zero_chi(n, k):
    return SmoothMap(n + k, k, lambda e: [0.0] * k, name="zero_chi")


def builtin_generator(name, E):
    """Built-ins over a bundle chart (time axis first):
    "time_translation", "space_translation", "boost" (1+1 Minkowski),
    "so2_rotation" (2-d fiber), "dilation" (negative control)."""
    n, k = E.base.dim, E.fiber_dim
    zero = _zero_chi(n, k)
    if name == "time_translation":
        xi = _const_xi([1.0] + [0.0] * (n - 1))
        return Generator(name, xi, zero,
                         xi_grid=lambda X: _const_grid(X, [1.0] + [0.0]
                                                       * (n - 1)),
                         chi_grid=_zero_grid(k))
    if name == "space_translation":
        if n < 2:
            raise AdmissibilityError("space translation needs n >= 2")
        xi = _const_xi([0.0, 1.0] + [0.0] * (n - 2))
        return Generator(name, xi, zero,
                         xi_grid=lambda X: _const_grid(X, [0.0, 1.0]
                                                       + [0.0] * (n - 2)),
                         chi_grid=_zero_grid(k))
    if name == "boost":
        if n != 2:
            raise AdmissibilityError("the boost generator needs n = 2")
        xi = SmoothMap(2, 2, lambda x: [x[1], x[0]], name="boost_xi")
        return Generator(name, xi, zero,
                         xi_grid=lambda X: np.stack([X[1], X[0]]),
                         chi_grid=_zero_grid(k), seam_safe=False)
    if name == "so2_rotation":
        if k != 2:
            raise AdmissibilityError("so2_rotation needs a 2-d fiber")
        chi = SmoothMap(n + 2, 2, lambda e: [-e[n + 1], e[n]],
                        name="so2_chi")
        return Generator(name, _const_xi([0.0] * n), chi,
                         xi_grid=lambda X: np.zeros_like(X),
                         chi_grid=lambda X, Y: np.stack([-Y[1], Y[0]]))
    if name == "dilation":
        xi = SmoothMap(n, n, lambda x: list(x), name="dilation_xi")
        return Generator(name, xi, zero,
                         xi_grid=lambda X: X.copy(),
                         chi_grid=_zero_grid(k), seam_safe=False)
    raise AdmissibilityError("unknown generator %r" % name)


def _const_grid(X, vec):
    out = np.zeros_like(X)
    for i, v in enumerate(vec):
        out[i] = v
    return out


def _zero_grid(k):
    def fn(X, Y):
        return np.zeros((k,) + Y.shape[1:])
    return fn


# ---------------------------------------------------------------------------
# admissibility gate


def check_admissible(gen, metric, points, tol=1e-8):
    """Conservation admissibility gate: the base part must be a Killing
    field of the metric at every sample point and the vertical part a
    constant antisymmetric linear map of the fiber (an internal so(2)
    rotation) or zero.  Raises AdmissibilityError otherwise."""
    pred = killing_jet_predicate(metric, tol=tol)
    n = gen.xi.dom_dim
    k = gen.chi.cod_dim
    for x in points:
        x = np.asarray(x, dtype=float)
        coeffs = np.concatenate([
            np.asarray(gen.xi.eval(x)),
            to_float(gen.xi.jacobian(x)).ravel()])
        if not pred(x, coeffs):
            raise AdmissibilityError(
                "generator %s: base part fails the Killing equation at %s"
                % (gen.name, x.tolist()))
    a_ref = None
    for x in points:
        x = np.asarray(x, dtype=float)
        y = 0.1 + 0.05 * np.arange(k)
        e = np.concatenate([x, y])
        jac = to_float(gen.chi.jacobian(e))
        dx_part, a = jac[:, :n], jac[:, n:]
        if np.max(np.abs(dx_part)) > tol:
            raise AdmissibilityError(
                "generator %s: vertical part depends on the base"
                % gen.name)
        if np.max(np.abs(a + a.T)) > tol:
            raise AdmissibilityError(
                "generator %s: vertical part is not antisymmetric"
                % gen.name)
        if np.max(np.abs(np.asarray(gen.chi.eval(e)) - a @ y)) > tol:
            raise AdmissibilityError(
                "generator %s: vertical part is not linear" % gen.name)
        if a_ref is None:
            a_ref = a
        elif np.max(np.abs(a - a_ref)) > tol:
            raise AdmissibilityError(
                "generator %s: vertical part is not constant" % gen.name)
    return True


# ---------------------------------------------------------------------------
# lifts and momentum maps


def _gen_data(gen, x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    e = np.concatenate([x, y])
    n = len(x)
    xi = np.asarray(gen.xi.eval(x))
    dxi = to_float(gen.xi.jacobian(x))
    chi = np.asarray(gen.chi.eval(e))
    jch = to_float(gen.chi.jacobian(e))
    return xi, dxi, chi, jch[:, :n], jch[:, n:]


def lift_ordinary(gen, z):
    """X_lift at an ordinary multiphase point, as a coordinate vector."""
    xi, dxi, chi, dchi_x, dchi_y = _gen_data(gen, z.x, z.y)
    P = z.P
    pdot = -np.trace(dxi) * P - dchi_y.T @ P + P @ dxi.T
    return np.concatenate([xi, chi, pdot.ravel()])


def lift_extended(gen, z):
    """Lift to the extended multiphase space (adds the c-component)."""
    xi, dxi, chi, dchi_x, dchi_y = _gen_data(gen, z.x, z.y)
    P = z.P
    pdot = -np.trace(dxi) * P - dchi_y.T @ P + P @ dxi.T
    cdot = -np.trace(dxi) * z.c - float(np.sum(P * dchi_x))
    return np.concatenate([xi, chi, pdot.ravel(), [cdot]])


def momentum_map(gen, space, point, vectors, H=None):
    """i_{X_lift} theta (space="extended") or i_{X_lift} theta_H
    (space="ordinary", needs H), evaluated on n-1 further vectors."""
    if space == "extended":
        return theta_eval(point, [lift_extended(gen, point)]
                          + list(vectors))
    if space == "ordinary":
        if H is None:
            raise GridError("ordinary momentum map needs a Hamiltonian")
        return theta_H_eval(H, point, [lift_ordinary(gen, point)]
                            + list(vectors))
    raise GridError("unknown momentum-map space %r" % space)


# ---------------------------------------------------------------------------
# currents on grid solutions


def _ordinary_point(phi, idx):
    if phi.P is None:
        raise GridError("currents need a momentum-carrying section")
    x = phi.point(idx)
    y = phi.value(idx)
    P = phi.P[(slice(None), slice(None)) + tuple(idx)]
    return OrdinaryCojetPoint(x[:phi.n], y, P)


def _pushed_basis(phi, idx):
    """T phi-hat (d_nu) for every base direction, by grid differences."""
    n, k = phi.n, phi.k
    kn = k * n
    out = []
    Pflat = phi.P.reshape((kn,) + phi.shape)
    for nu in range(n):
        dy = phi.derivative(idx, nu)
        dP = phi.derivative(idx, nu, arr=Pflat)
        e = np.zeros(n)
        e[nu] = 1.0
        out.append(np.concatenate([e, dy, dP]))
    return out


def current_at(H, phi, gen, idx):
    """Pointwise Noether current phi-hat^* (i_{X_lift} theta_H) at a
    grid node: J^mu = (-1)^mu theta_H(X_lift, pushed basis minus mu)."""
    idx = tuple(int(i) for i in idx)
    z = _ordinary_point(phi, idx)
    pushed = _pushed_basis(phi, idx)
    lift = lift_ordinary(gen, z)
    n = phi.n
    J = np.empty(n)
    for mu in range(n):
        rest = [pushed[nu] for nu in range(n) if nu != mu]
        J[mu] = (-1.0) ** mu * theta_H_eval(H, z, [lift] + rest)
    return CurrentForm(z.x, J)


def noether_current(H, phi, gen):
    """Current components J (shape (n,) + grid) at every interior node.

    Uses vectorized grid arithmetic when the generator carries grid
    evaluators and the Hamiltonian a ``grid_value`` attribute (the
    pointwise evaluator :func:`current_at` is the cross-check oracle);
    falls back to the pointwise loop otherwise.  Non-interior nodes are
    NaN.
    """
    n = phi.n
    J = np.full((n,) + phi.shape, np.nan)
    fast = (gen.xi_grid is not None and gen.chi_grid is not None
            and hasattr(H, "grid_value") and n in (1, 2))
    if fast:
        _current_grid(H, phi, gen, J)
        return J
    for idx in phi.interior_indices():
        J[(slice(None),) + tuple(idx)] = \
            current_at(H, phi, gen, tuple(idx)).components
    return J


def _grid_coords(phi):
    axes = [phi.origin[ax] + phi.spacing[ax] * np.arange(phi.shape[ax])
            for ax in range(phi.n)]
    return np.stack(np.meshgrid(*axes, indexing="ij"))


def _grid_derivative(phi, arr, ax):
    """Centered difference of a (...,) + grid array along grid axis
    ``ax``; non-interior slabs are NaN on non-periodic axes."""
    gax = arr.ndim - phi.n + ax
    if phi.periodic[ax]:
        plus = np.roll(arr, -1, axis=gax)
        minus = np.roll(arr, 1, axis=gax)
        return (plus - minus) / (2.0 * phi.spacing[ax])
    out = np.full_like(arr, np.nan)
    sl_in = [slice(None)] * arr.ndim
    sl_p = [slice(None)] * arr.ndim
    sl_m = [slice(None)] * arr.ndim
    sl_in[gax] = slice(1, -1)
    sl_p[gax] = slice(2, None)
    sl_m[gax] = slice(None, -2)
    out[tuple(sl_in)] = (arr[tuple(sl_p)] - arr[tuple(sl_m)]) \
        / (2.0 * phi.spacing[ax])
    return out


def _current_grid(H, phi, gen, J):
    n, k = phi.n, phi.k
    X = _grid_coords(phi)
    Y, P = phi.y, phi.P
    xi = gen.xi_grid(X)
    chi = gen.chi_grid(X, Y)
    h = H.grid_value(X, Y, P)
    if n == 1:
        J[0] = np.einsum("a...,a...->...", P[:, 0], chi) - h * xi[0]
        return
    dy = np.stack([_grid_derivative(phi, Y, nu) for nu in range(2)],
                  axis=1)  # (k, nu, grid)
    J[0] = (np.einsum("a...,a...->...", P[:, 0],
                      chi - xi[1] * dy[:, 1])
            + np.einsum("a...,a...->...", P[:, 1], xi[0] * dy[:, 1])
            - h * xi[0])
    J[1] = -(np.einsum("a...,a...->...", P[:, 0], -xi[1] * dy[:, 0])
             + np.einsum("a...,a...->...", P[:, 1],
                         xi[0] * dy[:, 0] - chi)
             + h * xi[1])


def current_divergence(phi, J, idx):
    """sum_mu d_mu J^mu at a node by centered differences."""
    idx = tuple(int(i) for i in idx)
    total = 0.0
    for mu in range(phi.n):
        total += float(phi.derivative(idx, mu, arr=J)[mu])
    div = total
    if not np.isfinite(div):
        raise GridError("divergence touches non-interior current values")
    return div


def divergence_field(phi, J, seam_safe=True):
    """Divergence array plus a validity mask (finite everywhere the
    centered stencil stays interior; for seam-unsafe generators the
    columns adjacent to a periodic wrap are masked out too)."""
    div = np.zeros(phi.shape)
    for mu in range(phi.n):
        div += _grid_derivative(phi, J, mu)[mu]
    mask = np.isfinite(div)
    if not seam_safe:
        for ax in range(phi.n):
            if phi.periodic[ax]:
                sl = [slice(None)] * phi.n
                for edge in (0, 1, phi.shape[ax] - 2, phi.shape[ax] - 1):
                    sl[ax] = edge
                    mask[tuple(sl)] = False
    return div, mask


# ---------------------------------------------------------------------------
# flow of a generator on the ordinary multiphase space


def flow_cojet(gen, t, z, steps_per_unit=200):
    """The induced cojet action of the generator's one-parameter group:
    integrate the base/vertical flow together with its frame a = D(flow)
    and vertical derivative Lv, then apply
    P' = det(a)^-1 Lv^-T P a^T.  This is the exponential route used as
    the oracle against the algebraic lift."""
    n, k = len(z.x), len(z.y)
    xi_body, chi_body = gen.xi.body, gen.chi.body

    def rhs(state):
        x, y = state[:n], state[n:n + k]
        a = state[n + k:n + k + n * n].reshape(n, n)
        lv = state[n + k + n * n:].reshape(k, k)
        xi = np.asarray([float(v) for v in xi_body(list(x))])
        chi = np.asarray([float(v) for v in chi_body(list(x) + list(y))])
        dxi = to_float(dual.jacobian(xi_body, list(x), n))
        jch = to_float(dual.jacobian(chi_body, list(x) + list(y), k))
        return np.concatenate([xi, chi, (dxi @ a).ravel(),
                               (jch[:, n:] @ lv).ravel()])

    state = np.concatenate([z.x, z.y, np.eye(n).ravel(),
                            np.eye(k).ravel()])
    nsteps = max(1, int(np.ceil(steps_per_unit * abs(t))))
    h = t / nsteps
    for _ in range(nsteps):
        k1 = rhs(state)
        k2 = rhs(state + 0.5 * h * k1)
        k3 = rhs(state + 0.5 * h * k2)
        k4 = rhs(state + h * k3)
        state = state + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    x2, y2 = state[:n], state[n:n + k]
    a = state[n + k:n + k + n * n].reshape(n, n)
    lv = state[n + k + n * n:].reshape(k, k)
    P2 = np.linalg.inv(lv).T @ z.P @ a.T / np.linalg.det(a)
    return OrdinaryCojetPoint(x2, y2, P2)


def _lie_theta_H(H, gen, z, vectors, flow_h=1e-4, push_h=1e-5):
    """(L_{X_lift} theta_H)(vectors) at z by central flow differences;
    vector pushforwards by central differences through the flow."""
    d0 = len(z.coords())

    def as_point(c):
        n, k = len(z.x), len(z.y)
        return OrdinaryCojetPoint(c[:n], c[n:n + k],
                                  c[n + k:].reshape(k, n))

    def pulled(t):
        z0 = z.coords()
        zt = flow_cojet(gen, t, z)
        pushed = []
        for w in vectors:
            w = np.asarray(w, dtype=float)
            zp = flow_cojet(gen, t, as_point(z0 + push_h * w)).coords()
            zm = flow_cojet(gen, t, as_point(z0 - push_h * w)).coords()
            pushed.append((zp - zm) / (2.0 * push_h))
        return theta_H_eval(H, zt, pushed)

    return (pulled(flow_h) - pulled(-flow_h)) / (2.0 * flow_h)


def claim1_check(H, gen, samples, flow_h=1e-4):
    """Max |(L_{X_lift} theta_H)(w_1..w_n)| over (point, vectors)
    samples: the invariance half of the conservation proof."""
    worst = 0.0
    for z, vectors in samples:
        worst = max(worst,
                    abs(_lie_theta_H(H, gen, z, vectors, flow_h=flow_h)))
    return worst


def claim2_check(H, phi, gen, idx):
    """phi-hat^* (i_{X_lift} omega_H) at a grid node: the equation-of-
    motion half; O(grid^2) on solutions, O(1) otherwise."""
    idx = tuple(int(i) for i in idx)
    z = _ordinary_point(phi, idx)
    pushed = _pushed_basis(phi, idx)
    return omega_H_eval(H, z, [lift_ordinary(gen, z)] + pushed)


def proof_decomposition(H, phi, gen, idx, flow_h=1e-4):
    """d i_X = L_X - i_X d, pulled back: returns (divergence,
    claim1_term + claim2_term) at the node, which must agree."""
    idx = tuple(int(i) for i in idx)
    J = np.full((phi.n,) + phi.shape, np.nan)
    for nbr in _stencil(phi, idx):
        J[(slice(None),) + nbr] = current_at(H, phi, gen, nbr).components
    div = current_divergence(phi, J, idx)
    z = _ordinary_point(phi, idx)
    pushed = _pushed_basis(phi, idx)
    term1 = _lie_theta_H(H, gen, z, pushed, flow_h=flow_h)
    term2 = claim2_check(H, phi, gen, idx)
    return div, term1 + term2


def _stencil(phi, idx):
    out = [tuple(idx)]
    for ax in range(phi.n):
        for step in (-1, 1):
            j = list(idx)
            j[ax] += step
            if phi.periodic[ax]:
                j[ax] %= phi.shape[ax]
            out.append(tuple(j))
    return out
