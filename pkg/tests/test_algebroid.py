"""Algebroid brackets, the jet algebroid, groupoid algebroids, the
exponential map and Killing-type section gates."""

import numpy as np
import pytest

from gnk import dual
from gnk.algebroid import (AlgebroidSection, algebroid_of_groupoid,
                           anchor_apply, bracket, exponential,
                           jacobi_residual, jet_algebroid,
                           jet_prolong_section, killing_jet_predicate,
                           sections_with_prolongation_in,
                           so3_bundle_algebroid, tangent_algebroid)
from gnk.groupoid import builtin_groupoid
from gnk.smooth import SmoothMap, box_sampler


def vf(base, body, name="xi"):
    return AlgebroidSection(SmoothMap(base.dim, base.dim, body, name=name),
                            name=name)


class TestTangentBracket:
    def test_matches_ad_commutator(self, square, rng):
        S = tangent_algebroid(square)
        xi = vf(square, lambda x: [x[1] ** 2, dual.sin(x[0])], "xi")
        eta = vf(square, lambda x: [x[0] * x[1], x[0] + 0.5], "eta")
        br = bracket(S, xi, eta)
        for _ in range(10):
            x = box_sampler(square.box, rng)
            # oracle: [X, Y] = dY X - dX Y for coordinate vector fields
            dxi = dual.jacobian(xi.coeffs.body, list(x), 2)
            deta = dual.jacobian(eta.coeffs.body, list(x), 2)
            expect = deta @ np.asarray(xi(x)) - dxi @ np.asarray(eta(x))
            assert np.allclose(br(x), expect, atol=1e-12)

    def test_anchor_is_identity(self, square, rng):
        S = tangent_algebroid(square)
        xi = vf(square, lambda x: [x[0], -x[1]])
        x = box_sampler(square.box, rng)
        assert np.allclose(anchor_apply(S, xi, x), xi(x), atol=1e-14)


class TestStructureTensors:
    @pytest.mark.parametrize("make", [tangent_algebroid,
                                      so3_bundle_algebroid])
    def test_exact_antisymmetry(self, make, square, rng):
        S = make(square)
        JS = jet_algebroid(S)
        x = box_sampler(square.box, rng)
        for T in (S.bracket_at(x), JS.bracket_at(x)):
            assert np.max(np.abs(T + T.swapaxes(0, 1))) == 0.0

    def test_so3_epsilon(self, square):
        S = so3_bundle_algebroid(square)
        F = S.bracket_at([0.0, 0.0])
        assert F[0, 1, 2] == 1.0 and F[1, 0, 2] == -1.0
        assert F[1, 2, 0] == 1.0 and F[2, 0, 1] == 1.0
        assert np.allclose(S.anchor_at([0.0, 0.0]), 0.0)


class TestJetAlgebroid:
    def test_hand_value_tm(self, square):
        # TM over a 2d base: [T_a^mu, T_b^nu] = f_a^nu T_b^mu - f_b^mu T_a^nu
        # with anchor f_a^mu = delta.  So [T_0^1, T_1^0] = T_1^1 - T_0^0.
        S = tangent_algebroid(square)
        JS = jet_algebroid(S)
        F = JS.bracket_at([0.1, -0.2])
        r, n = 2, 2
        i01 = r + 0 * n + 1   # T_0^1
        i10 = r + 1 * n + 0   # T_1^0
        i11 = r + 1 * n + 1
        i00 = r + 0 * n + 0
        expect = np.zeros(JS.rank)
        expect[i11] = 1.0
        expect[i00] = -1.0
        assert np.allclose(F[i01, i10], expect, atol=1e-14)

    def test_prolongation_preserves_bracket(self, square, rng):
        S = tangent_algebroid(square)
        JS = jet_algebroid(S)
        xi = vf(square, lambda x: [x[1] ** 2, 0.3 * x[0]])
        eta = vf(square, lambda x: [x[0] * x[1], x[1]])
        lhs = jet_prolong_section(S, bracket(S, xi, eta))
        rhs = bracket(JS, jet_prolong_section(S, xi),
                      jet_prolong_section(S, eta))
        for _ in range(5):
            x = box_sampler(square.box, rng)
            assert np.allclose(lhs(x), rhs(x), atol=1e-8)

    @pytest.mark.parametrize("make", [tangent_algebroid,
                                      so3_bundle_algebroid])
    def test_jacobi(self, make, square, rng):
        S = make(square)
        JS = jet_algebroid(S)
        r = S.rank
        secs = []
        for i in range(3):
            c = rng.standard_normal((r, 3))
            secs.append(AlgebroidSection(
                SmoothMap(2, r,
                          lambda x, c=c: [c[a, 0] + c[a, 1] * x[0]
                                          + c[a, 2] * x[1]
                                          for a in range(r)]),
                name="s%d" % i))
        x = box_sampler(square.box, rng)
        assert jacobi_residual(S, *secs, x) < 1e-8
        jsecs = [jet_prolong_section(S, s) for s in secs]
        assert jacobi_residual(JS, *jsecs, x) < 1e-8


class TestGroupoidAlgebroid:
    def test_pair_algebroid_is_tm(self, square, rng):
        G = builtin_groupoid("pair", square)
        alg = algebroid_of_groupoid(G)
        assert alg.rank == 2
        S = alg.structure_functions()
        x = box_sampler(square.box, rng)
        # anchor is +-identity depending on basis orientation; bracket
        # constants vanish
        a = S.anchor_at(x)
        assert np.allclose(np.abs(np.linalg.det(a)), 1.0, atol=1e-10)
        assert np.max(np.abs(S.bracket_at(x))) < 1e-10

    def test_so2_bundle_structure(self, square, rng):
        G = builtin_groupoid("group_bundle", square)
        alg = algebroid_of_groupoid(G)
        assert alg.rank == 1
        S = alg.structure_functions()
        x = box_sampler(square.box, rng)
        assert np.allclose(S.anchor_at(x), 0.0, atol=1e-12)
        assert np.allclose(S.bracket_at(x), 0.0, atol=1e-12)


class TestExponential:
    def test_unit_at_zero(self, square, rng):
        G = builtin_groupoid("pair", square)
        alg = algebroid_of_groupoid(G)
        xi = AlgebroidSection.constant(square, [0.3, -0.2])
        x = box_sampler(square.box, rng, margin=0.3)
        g0 = exponential(alg, xi, 0.0, x)
        assert np.array_equal(g0, np.asarray(G.unit.eval(x), dtype=float))

    def test_so2_closed_form(self, square, rng):
        # constant section c over the SO(2) bundle flows to angle t*c
        G = builtin_groupoid("group_bundle", square)
        alg = algebroid_of_groupoid(G)
        c = 0.7
        sign = float(alg.basis[2, 0])  # basis orientation of the theta axis
        xi = AlgebroidSection.constant(square, [c])
        x = box_sampler(square.box, rng, margin=0.2)
        t = 0.9
        g = exponential(alg, xi, t, x)
        assert np.allclose(g[:2], x, atol=1e-10)
        assert g[2] == pytest.approx(sign * t * c, abs=1e-8)

    def test_pair_constant_flow(self, square):
        # for the pair groupoid with a constant section, exp(t xi) is an
        # arrow whose target drifts linearly from x
        G = builtin_groupoid("pair", square)
        alg = algebroid_of_groupoid(G)
        xi = AlgebroidSection.constant(square, [0.5, -0.25])
        x = np.array([0.0, 0.0])
        t = 0.8
        g = np.asarray(exponential(alg, xi, t, x))
        assert np.allclose(g[2:], x, atol=1e-10)     # source stays put
        v = alg.basis[:2] @ np.array([0.5, -0.25])   # target velocity
        assert np.allclose(g[:2], t * v, atol=1e-8)


class TestKillingGate:
    def test_euclidean(self, square, rng):
        S = tangent_algebroid(square)
        pts = [box_sampler(square.box, rng) for _ in range(10)]
        pred = killing_jet_predicate(np.eye(2))
        rot = vf(square, lambda x: [-x[1], x[0]], "rot")
        dil = vf(square, lambda x: [x[0], x[1]], "dil")
        assert sections_with_prolongation_in(S, pred, rot, pts)
        assert not sections_with_prolongation_in(S, pred, dil, pts)

    def test_minkowski_boost(self, square, minkowski, rng):
        S = tangent_algebroid(square)
        pts = [box_sampler(square.box, rng) for _ in range(10)]
        pred = killing_jet_predicate(minkowski)
        boost = vf(square, lambda x: [x[1], x[0]], "boost")
        rot = vf(square, lambda x: [-x[1], x[0]], "rot")
        assert sections_with_prolongation_in(S, pred, boost, pts)
        assert not sections_with_prolongation_in(S, pred, rot, pts)
