"""Seeded property-verification suites.

Each suite runs randomized checks of the algebraic laws the package is
built on (groupoid axioms, jet chain rules, algebroid brackets, induced
action laws, multisymplectic invariance) and returns a list of check
records ``{suite, property, n_samples, max_residual, tolerance, mode,
passed}``.  ``mode`` is "max" for ordinary residual bounds and "min"
for negative controls that must *violate* a bound.

The CLI drives these through :func:`run_suites`; the acceptance tests
call the individual suites with pinned tolerances.
"""

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from gnk.actions import (act_extended_cojet, act_jet, act_tangent,
                         apply_bisection, element_with_source,
                         frame_transport_action, rotation_action,
                         sample_compatible_jet, second_order_cojet_map,
                         tangent_matrix, transport_action)
from gnk.algebroid import (AlgebroidSection, algebroid_of_groupoid,
                           bracket, exponential, jacobi_residual,
                           jet_algebroid, jet_prolong_section,
                           so3_bundle_algebroid, tangent_algebroid)
from gnk.groupoid import (builtin_groupoid, bisection_product, invert,
                          multiply, pair_bisection, tau_part, unit)
from gnk.jet_bundle import ExtendedCojetPoint, jet_from_fiber_block
from gnk.jet_groupoid import (JetElement, frame_of, jet_of_bisection,
                              jg_invert, jg_multiply, jg_unit,
                              pairjet_to_frame, sample_jet_element,
                              sample_second_order_element)
from gnk.manifold_bundle import ChartManifold, trivial_bundle
from gnk.multiphase import (builtin_lagrangian, cojet_form_iso,
                            check_lagrangian_invariance, legendre_full,
                            omega_eval, theta_eval)
from gnk.smooth import SmoothMap, box_sampler, random_polynomial_map

__all__ = ["SUITES", "TOLERANCES", "run_suites"]

TOLERANCES = {
    "groupoid_axioms": 1e-9,
    "groupoid_closure": 1e-9,
    "jet_axioms": 1e-9,
    "jet_chain_rule": 1e-8,
    "jet_frame_morphism": 1e-10,
    "algebroid_antisymmetry": 0.0,
    "algebroid_jacobi": 1e-8,
    "algebroid_prolongation_bracket": 1e-8,
    "exponential_unit": 0.0,
    "exponential_derivative": 1e-6,
    "exponential_one_parameter": 1e-7,
    "action_laws": 1e-9,
    "action_linearity": 1e-12,
    "action_frame_covering": 1e-10,
    "action_projection_compat": 1e-6,
    "cojet_form_equivariance": 1e-9,
    "theta_invariance": 1e-7,
    "omega_invariance": 1e-6,
    "omega_nonholonomous_control": 1e-3,
    "lagrangian_invariance": 1e-9,
    "legendre_equivariance": 1e-9,
    "dilation_control": 1e-2,
}


def _check(suite, prop, residual, n_samples, tolerances, mode="max"):
    tol = tolerances[prop]
    passed = residual <= tol if mode == "max" else residual > tol
    return {"suite": suite, "property": prop, "n_samples": int(n_samples),
            "max_residual": float(residual), "tolerance": float(tol),
            "mode": mode, "passed": bool(passed)}


def _square(half=1.0):
    return ChartManifold(2, [(-half, half), (-half, half)])


_MINK = np.diag([1.0, -1.0])


def _builtin_groupoids():
    M = _square()
    return [("pair", builtin_groupoid("pair", M)),
            ("frame", builtin_groupoid("frame", M)),
            ("group_bundle", builtin_groupoid("group_bundle", M)),
            ("orthonormal_frame",
             builtin_groupoid("orthonormal_frame", M, metric=_MINK))]


def _composable(G, rng, count):
    chain = [G.sample_element(rng)]
    for _ in range(count - 1):
        chain.append(element_with_source(
            G, G.sample_element(rng), G.tau.eval(chain[-1])))
    return chain


def suite_groupoid(seed=0, samples=200, tolerances=TOLERANCES):
    rng = np.random.default_rng(seed)
    checks = []
    for name, G in _builtin_groupoids():
        worst = 0.0
        closure = 0.0
        for _ in range(samples):
            g1, g2, g3 = _composable(G, rng, 3)
            lhs = multiply(G, multiply(G, g3, g2), g1)
            rhs = multiply(G, g3, multiply(G, g2, g1))
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
            x_s, x_t = G.sigma.eval(g1), G.tau.eval(g1)
            worst = max(worst, float(np.max(np.abs(
                multiply(G, g1, unit(G, x_s)) - g1))))
            worst = max(worst, float(np.max(np.abs(
                multiply(G, unit(G, x_t), g1) - g1))))
            gi = invert(G, g1)
            worst = max(worst, float(np.max(np.abs(
                multiply(G, gi, g1) - unit(G, x_s)))))
            worst = max(worst, float(np.max(np.abs(
                multiply(G, g1, gi) - unit(G, x_t)))))
            prod = multiply(G, g2, g1)
            worst = max(worst, float(np.max(np.abs(
                np.asarray(G.sigma.eval(prod)) - np.asarray(x_s)))))
            if G.membership is not None:
                for h in (prod, gi):
                    if not G.contains(h):
                        closure = max(closure, 1.0)
        checks.append(_check("groupoid", "groupoid_axioms", worst,
                             samples, tolerances))
        if G.membership is not None:
            checks.append(_check("groupoid", "groupoid_closure", closure,
                                 samples, tolerances))
    return checks


def _near_identity_bisection(G, rng, scale=0.15):
    n = G.base.dim
    p = random_polynomial_map(n, n, 2, rng, scale=1.0)
    p_body = p.body

    def body(x):
        px = p_body(list(x))
        return [x[i] + scale * px[i] for i in range(n)]

    return pair_bisection(G, SmoothMap(n, n, body, name="near_id"))


def suite_jet(seed=0, samples=200, tolerances=TOLERANCES):
    rng = np.random.default_rng(seed)
    checks = []
    # groupoid axioms for jet elements
    for name, G in _builtin_groupoids()[:3]:
        worst = 0.0
        for _ in range(samples):
            u1 = sample_jet_element(G, rng)
            u2 = sample_jet_element(G, rng, g=element_with_source(
                G, G.sample_element(rng), G.tau.eval(u1.g)))
            u3 = sample_jet_element(G, rng, g=element_with_source(
                G, G.sample_element(rng), G.tau.eval(u2.g)))
            lhs = jg_multiply(G, jg_multiply(G, u3, u2), u1)
            rhs = jg_multiply(G, u3, jg_multiply(G, u2, u1))
            worst = max(worst, float(np.max(np.abs(
                lhs.coords() - rhs.coords()))))
            x_s = G.sigma.eval(u1.g)
            worst = max(worst, float(np.max(np.abs(
                jg_multiply(G, u1, jg_unit(G, x_s)).coords()
                - u1.coords()))))
            worst = max(worst, float(np.max(np.abs(
                jg_multiply(G, jg_unit(G, G.tau.eval(u1.g)), u1).coords()
                - u1.coords()))))
            worst = max(worst, float(np.max(np.abs(
                jg_multiply(G, jg_invert(G, u1), u1).coords()
                - jg_unit(G, x_s).coords()))))
        checks.append(_check("jet", "jet_axioms", worst, samples,
                             tolerances))
    # chain rule: j(b2 b1) = j(b2) . j(b1) for polynomial bisections
    G = builtin_groupoid("pair", _square())
    n_bis = max(1, samples // 2)
    worst = 0.0
    for _ in range(n_bis):
        b1 = _near_identity_bisection(G, rng)
        b2 = _near_identity_bisection(G, rng)
        x = box_sampler(G.base.box, rng, margin=0.3)
        lhs = jet_of_bisection(G, bisection_product(G, b2, b1), x)
        rhs = jg_multiply(G, jet_of_bisection(G, b2, b1.tau_of(x)),
                          jet_of_bisection(G, b1, x))
        worst = max(worst, float(np.max(np.abs(
            lhs.coords() - rhs.coords()))))
    checks.append(_check("jet", "jet_chain_rule", worst, n_bis,
                         tolerances))
    # pair-jet <-> frame element identification is a groupoid morphism
    Gf = builtin_groupoid("frame", _square())
    worst = 0.0
    for _ in range(samples):
        u1 = sample_jet_element(G, rng)
        u2 = sample_jet_element(G, rng, g=element_with_source(
            G, G.sample_element(rng), G.tau.eval(u1.g)))
        worst = max(worst, float(np.max(np.abs(
            pairjet_to_frame(Gf, jg_multiply(G, u2, u1))
            - multiply(Gf, pairjet_to_frame(Gf, u2),
                       pairjet_to_frame(Gf, u1))))))
        worst = max(worst, float(np.max(np.abs(
            pairjet_to_frame(Gf, jg_invert(G, u1))
            - invert(Gf, pairjet_to_frame(Gf, u1))))))
        x = box_sampler(G.base.box, rng, margin=0.1)
        worst = max(worst, float(np.max(np.abs(
            pairjet_to_frame(Gf, jg_unit(G, x)) - unit(Gf, x)))))
    checks.append(_check("jet", "jet_frame_morphism", worst, samples,
                         tolerances))
    return checks


def _random_section(S, rng, scale=0.4):
    return AlgebroidSection(
        random_polynomial_map(S.base.dim, S.rank, 2, rng, scale=scale))


def suite_algebroid(seed=0, samples=200, tolerances=TOLERANCES):
    rng = np.random.default_rng(seed)
    checks = []
    M = _square()
    trials = max(1, samples // 10)
    for S in (tangent_algebroid(M), so3_bundle_algebroid(M)):
        JS = jet_algebroid(S)
        anti = jac = pres = 0.0
        n_pts = 0
        for _ in range(trials):
            xi, eta, zeta = (_random_section(S, rng) for _ in range(3))
            jxi = jet_prolong_section(S, xi)
            jeta = jet_prolong_section(S, eta)
            jzeta = jet_prolong_section(S, zeta)
            br = bracket(S, xi, eta)
            br_flip = bracket(S, eta, xi)
            jbr = bracket(JS, jxi, jeta)
            jbr_flip = bracket(JS, jeta, jxi)
            jbr_of_br = jet_prolong_section(S, br)
            for _ in range(3):
                x = box_sampler(M.box, rng, margin=0.2)
                n_pts += 1
                # antisymmetry is exact for the structure tensors; the
                # section-level brackets add AD-computed Leibniz terms,
                # antisymmetric only to rounding
                for F in (S.bracket_at(x), JS.bracket_at(x)):
                    anti = max(anti, float(np.max(np.abs(
                        F + F.swapaxes(0, 1)))))
                jac = max(jac, float(np.max(np.abs(
                    np.asarray(br(x)) + np.asarray(br_flip(x))))))
                jac = max(jac, float(np.max(np.abs(
                    np.asarray(jbr(x)) + np.asarray(jbr_flip(x))))))
                jac = max(jac, float(jacobi_residual(JS, jxi, jeta,
                                                     jzeta, x)))
                pres = max(pres, float(np.max(np.abs(
                    np.asarray(jbr(x)) - np.asarray(jbr_of_br(x))))))
        checks.append(_check("algebroid", "algebroid_antisymmetry", anti,
                             n_pts, tolerances))
        checks.append(_check("algebroid", "algebroid_jacobi", jac, n_pts,
                             tolerances))
        checks.append(_check("algebroid", "algebroid_prolongation_bracket",
                             pres, n_pts, tolerances))
    # exponential of groupoid algebroids
    trials = max(1, samples // 20)
    res_unit = res_deriv = res_law = 0.0
    for name in ("pair", "group_bundle"):
        G = builtin_groupoid(name, M)
        alg = algebroid_of_groupoid(G)
        for _ in range(trials):
            xi = AlgebroidSection(random_polynomial_map(
                M.dim, alg.rank, 2, rng, scale=0.3))
            x = box_sampler(M.box, rng, margin=0.4)
            res_unit = max(res_unit, float(np.max(np.abs(
                exponential(alg, xi, 0.0, x)
                - np.asarray(unit(G, x))))))
            h = 1e-4
            fd = (exponential(alg, xi, h, x)
                  - exponential(alg, xi, -h, x)) / (2.0 * h)
            res_deriv = max(res_deriv, float(np.max(np.abs(
                fd - np.asarray(alg.realize(xi).eval(x))))))
            s, t = rng.uniform(0.05, 0.2, size=2)
            g_t = exponential(alg, xi, t, x)
            g_s = exponential(alg, xi, s, G.tau.eval(g_t))
            res_law = max(res_law, float(np.max(np.abs(
                exponential(alg, xi, s + t, x)
                - multiply(G, g_s, g_t)))))
    checks.append(_check("algebroid", "exponential_unit", res_unit,
                         2 * trials, tolerances))
    checks.append(_check("algebroid", "exponential_derivative", res_deriv,
                         2 * trials, tolerances))
    checks.append(_check("algebroid", "exponential_one_parameter",
                         res_law, 2 * trials, tolerances))
    return checks


def _builtin_actions():
    M = _square()
    E2 = trivial_bundle(M, 2, half_width=3.0)
    return [
        ("transport", transport_action(builtin_groupoid("pair", M), E2)),
        ("rotation", rotation_action(
            builtin_groupoid("group_bundle", M), E2)),
    ]


def suite_actions(seed=0, samples=200, tolerances=TOLERANCES):
    rng = np.random.default_rng(seed)
    checks = []
    for name, A in _builtin_actions():
        G = A.G
        d = A.E.total_dim
        law = lin = cov = 0.0
        for _ in range(samples):
            u1, e = sample_compatible_jet(A, rng)
            v = rng.standard_normal(d)
            u2 = sample_jet_element(G, rng, g=element_with_source(
                G, G.sample_element(rng), G.tau.eval(u1.g)))
            e_l, v_l = act_tangent(A, jg_multiply(G, u2, u1), (e, v))
            e_r, v_r = act_tangent(A, u2, act_tangent(A, u1, (e, v)))
            law = max(law, float(np.max(np.abs(e_l - e_r))),
                      float(np.max(np.abs(v_l - v_r))))
            e_u, v_u = act_tangent(A, jg_unit(G, e[:G.base.dim]), (e, v))
            law = max(law, float(np.max(np.abs(e_u - e))),
                      float(np.max(np.abs(v_u - v))))
            L = tangent_matrix(A, u1, e)
            w = rng.standard_normal(d)
            c1 = rng.standard_normal()
            _, v_c = act_tangent(A, u1, (e, c1 * v + w))
            lin = max(lin, float(np.max(np.abs(
                v_c - (c1 * L @ v + L @ w)))))
            # the tangent action covers the frame action on TM
            n = A.E.base.dim
            cov = max(cov, float(np.max(np.abs(
                (L @ v)[:n] - frame_of(u1) @ v[:n]))))
        checks.append(_check("actions", "action_laws", law, samples,
                             tolerances))
        checks.append(_check("actions", "action_linearity", lin, samples,
                             tolerances))
        checks.append(_check("actions", "action_frame_covering", cov,
                             samples, tolerances))
    # tangent representation of bisections projects to the point action
    name, A = _builtin_actions()[0]
    n_fd = max(1, samples // 4)
    worst = 0.0
    h = 1e-5
    for _ in range(n_fd):
        b = _near_identity_bisection(A.G, rng)
        e = box_sampler(A.E.total_box, rng, margin=0.3)
        v = rng.standard_normal(A.E.total_dim)
        _, v_push = apply_bisection(A, b, "TE", (e, v))
        fd = (apply_bisection(A, b, "E", e + h * v)
              - apply_bisection(A, b, "E", e - h * v)) / (2.0 * h)
        worst = max(worst, float(np.max(np.abs(v_push - fd))))
    checks.append(_check("actions", "action_projection_compat", worst,
                         n_fd, tolerances))
    return checks


def _lambda_point(zc, n, k):
    return ExtendedCojetPoint(zc[:n], zc[n:n + k],
                              zc[n + k:n + k + k * n].reshape(k, n),
                              zc[n + k + k * n])


def _fd_push(F, zc, v, h=1e-5):
    return (F(zc + h * v) - F(zc - h * v)) / (2.0 * h)


def _sample_lambda(E, rng):
    n, k = E.base.dim, E.fiber_dim
    e = box_sampler(E.total_box, rng, margin=0.2)
    return np.concatenate([e, rng.standard_normal(k * n),
                           rng.standard_normal(1)])


def suite_multiphase(seed=0, samples=200, tolerances=TOLERANCES):
    rng = np.random.default_rng(seed)
    checks = []
    M = _square()
    G = builtin_groupoid("pair", M)
    E = trivial_bundle(M, 2, half_width=3.0)
    A = transport_action(G, E)
    n, k = E.base.dim, E.fiber_dim
    d = n + k + k * n + 1
    # cojet <-> horizontal-form isomorphism is equivariant
    worst = 0.0
    for _ in range(samples):
        u, e = sample_compatible_jet(A, rng)
        z = ExtendedCojetPoint(e[:n], e[n:], rng.standard_normal((k, n)),
                               rng.standard_normal())
        L = tangent_matrix(A, u, e)
        vs = [rng.standard_normal(n + k) for _ in range(n)]
        lhs = cojet_form_iso(act_extended_cojet(A, u, z)).eval(
            [L @ v for v in vs])
        rhs = cojet_form_iso(z).eval(vs)
        worst = max(worst, abs(lhs - rhs))
    checks.append(_check("multiphase", "cojet_form_equivariance", worst,
                         samples, tolerances))
    # theta invariance under semiholonomic second-order elements
    worst = 0.0
    for _ in range(samples):
        s = sample_second_order_element(G, rng, spread=0.3,
                                        semiholonomic=True)
        zc = _sample_lambda(E, rng)
        zc[:n] = G.sigma.eval(s.g)
        F = second_order_cojet_map(A, s)
        z1 = F(zc)
        vs = [rng.standard_normal(d) for _ in range(n)]
        lhs = theta_eval(_lambda_point(z1, n, k),
                         [_fd_push(F, zc, v) for v in vs])
        rhs = theta_eval(_lambda_point(zc, n, k), vs)
        worst = max(worst, abs(lhs - rhs))
    checks.append(_check("multiphase", "theta_invariance", worst, samples,
                         tolerances))
    # omega invariance under holonomic second jets of bisections, and a
    # constructed non-holonomous semiholonomic element breaking it
    n_om = max(1, samples // 2)
    worst = 0.0
    control = 0.0
    for _ in range(n_om):
        b = _near_identity_bisection(G, rng)
        x = box_sampler(M.box, rng, margin=0.3)
        s = jet_of_bisection(G, b, x, order=2)
        zc = _sample_lambda(E, rng)
        zc[:n] = x
        F = second_order_cojet_map(A, s)
        z1 = F(zc)
        vs = [rng.standard_normal(d) for _ in range(n + 1)]
        rhs = omega_eval(_lambda_point(zc, n, k), vs)
        lhs = omega_eval(_lambda_point(z1, n, k),
                         [_fd_push(F, zc, v) for v in vs])
        worst = max(worst, abs(lhs - rhs))
        # asymmetric second-order data in the target rows stays
        # semiholonomic but is not a prolongation
        s.dU = s.dU.copy()
        s.dU[0, 0, 1] += 0.5
        s.dU[0, 1, 0] -= 0.5
        F2 = second_order_cojet_map(A, s)
        z2 = F2(zc)
        lhs2 = omega_eval(_lambda_point(z2, n, k),
                          [_fd_push(F2, zc, v) for v in vs])
        control = max(control, abs(lhs2 - rhs))
    checks.append(_check("multiphase", "omega_invariance", worst, n_om,
                         tolerances))
    checks.append(_check("multiphase", "omega_nonholonomous_control",
                         control, n_om, tolerances, mode="min"))
    # Klein-Gordon density: invariant under the orthonormal-frame
    # groupoid of the Minkowski metric, equivariant under the extended
    # Legendre map, broken by dilation jets
    Gm = builtin_groupoid("orthonormal_frame", M, metric=_MINK)
    E1 = trivial_bundle(M, 1, half_width=3.0)
    Am = frame_transport_action(Gm, E1)
    L = builtin_lagrangian("klein_gordon", E1, mass=0.5, metric=_MINK)

    def sampler(rng_):
        e = box_sampler(E1.total_box, rng_, margin=0.05)
        g = element_with_source(Gm, Gm.sample_element(rng_), e[:2])
        a = g[4:8].reshape(2, 2)
        if np.linalg.det(a) < 0.0:
            # restrict to the orientation-preserving component: the
            # density is invariant under all of O(1,1) but the
            # Lagrangian n-form changes sign with the orientation
            a = a @ np.diag([-1.0, 1.0])
            g = np.concatenate([g[:4], a.ravel()])
        U = np.vstack([a, np.eye(2), 0.3 * rng_.standard_normal((4, 2))])
        u = JetElement(Gm, g, U)
        return u, jet_from_fiber_block(e, rng_.standard_normal((1, 2)))

    rep = check_lagrangian_invariance(L, Am, sampler, n_samples=samples,
                                      seed=seed + 1)
    checks.append(_check("multiphase", "lagrangian_invariance",
                         rep["max_residual"], samples, tolerances))
    rng2 = np.random.default_rng(seed + 1)
    worst = 0.0
    for _ in range(samples):
        u, w = sampler(rng2)
        lhs = legendre_full(L, act_jet(Am, u, w))
        rhs = act_extended_cojet(Am, u, legendre_full(L, w))
        worst = max(worst, float(np.max(np.abs(
            lhs.coords() - rhs.coords()))))
    checks.append(_check("multiphase", "legendre_equivariance", worst,
                         samples, tolerances))
    Gp = builtin_groupoid("pair", M)
    Ap = transport_action(Gp, E1)
    control = 0.0
    for _ in range(samples):
        e = box_sampler(E1.total_box, rng2, margin=0.05)
        g = np.concatenate([e[:2], e[:2]])
        u = JetElement(Gp, g, np.vstack([1.3 * np.eye(2), np.eye(2)]))
        w = jet_from_fiber_block(e, 1.0 + rng2.standard_normal((1, 2)))
        det = np.linalg.det(frame_of(u))
        control = max(control, abs(
            L.value(act_jet(Ap, u, w)) * det - L.value(w)))
    checks.append(_check("multiphase", "dilation_control", control,
                         samples, tolerances, mode="min"))
    return checks


SUITES = {
    "groupoid": suite_groupoid,
    "jet": suite_jet,
    "algebroid": suite_algebroid,
    "actions": suite_actions,
    "multiphase": suite_multiphase,
}


def run_suites(names=None, seed=0, samples=200, tolerances=None,
               max_workers=None):
    """Run the named suites (all of them by default) and aggregate the
    check records; suites run in parallel up to ``max_workers``."""
    if names is None or names == "all" or names == ["all"]:
        names = list(SUITES)
    elif isinstance(names, str):
        names = [names]
    tol = dict(TOLERANCES)
    if tolerances:
        tol.update(tolerances)
    with ThreadPoolExecutor(max_workers=max_workers or len(names)) as ex:
        futures = [ex.submit(SUITES[s], seed=seed, samples=samples,
                             tolerances=tol) for s in names]
        checks = [c for f in futures for c in f.result()]
    failed = [c for c in checks if not c["passed"]]
    worst = None
    if failed:
        worst = max(failed, key=lambda c: c["max_residual"])
    return {"suites": list(names), "seed": int(seed),
            "samples": int(samples), "checks": checks,
            "n_checks": len(checks), "n_failed": len(failed),
            "passed": not failed, "worst_failure": worst}
