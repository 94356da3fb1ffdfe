"""Groupoid actions and all of their induced representations."""

import numpy as np
import pytest

from gnk.actions import (ActionChart, TensorPoint, act, act_extended_cojet,
                         act_jet, act_linjet, act_ordinary_cojet,
                         act_tangent, act_tensor, act_vertical,
                         apply_bisection, builtin_action,
                         check_tensor_invariance, element_with_source,
                         fundamental_vector_field, sample_compatible_jet,
                         sample_compatible_pair, second_order_cojet_map,
                         tangent_matrix, vertical_matrix)
from gnk.algebroid import AlgebroidSection, algebroid_of_groupoid, exponential
from gnk.errors import CompositionError
from gnk.groupoid import builtin_groupoid, pair_bisection
from gnk.jet_bundle import (ExtendedCojetPoint, LinJet, eval_extended,
                            eval_ordinary, jet_from_fiber_block,
                            linear_part)
from gnk.jet_groupoid import frame_of, jg_multiply, sample_jet_element
from gnk.smooth import SmoothMap, box_sampler


@pytest.fixture
def transport(square, bundle2):
    return builtin_action("transport", builtin_groupoid("pair", square),
                          bundle2)


@pytest.fixture
def rotation(square, bundle2):
    return builtin_action("rotation",
                          builtin_groupoid("group_bundle", square),
                          bundle2)


class TestPointAction:
    def test_transport_hand_value(self, transport):
        g = np.array([0.3, -0.4, 0.1, 0.2])      # arrow x=(0.1,0.2)->y
        e = np.array([0.1, 0.2, 1.5, -2.0])
        out = act(transport, g, e)
        assert np.allclose(out, [0.3, -0.4, 1.5, -2.0])

    def test_rotation_hand_value(self, rotation):
        th = 0.6
        g = np.array([0.1, 0.2, th])
        e = np.array([0.1, 0.2, 1.0, 0.0])
        out = act(rotation, g, e)
        assert np.allclose(out, [0.1, 0.2, np.cos(th), np.sin(th)])

    def test_incompatible_raises(self, transport):
        with pytest.raises(CompositionError):
            act(transport, [0.3, -0.4, 0.1, 0.2], [0.5, 0.2, 0.0, 0.0])

    def test_action_law(self, rotation, rng):
        G = rotation.G
        for _ in range(20):
            g, e = sample_compatible_pair(rotation, rng)
            h = element_with_source(G, G.sample_element(rng),
                                    G.tau.eval(g))
            from gnk.groupoid import multiply
            lhs = act(rotation, multiply(G, h, g), e)
            rhs = act(rotation, h, act(rotation, g, e))
            assert np.allclose(lhs, rhs, atol=1e-12)


class TestVertical:
    def test_transport_vertical_identity(self, transport, rng):
        g, e = sample_compatible_pair(transport, rng)
        assert np.allclose(vertical_matrix(transport, g, e), np.eye(2),
                           atol=1e-12)

    def test_rotation_vertical_is_rotation_matrix(self, rotation, rng):
        g, e = sample_compatible_pair(rotation, rng)
        th = g[2]
        R = np.array([[np.cos(th), -np.sin(th)],
                      [np.sin(th), np.cos(th)]])
        assert np.allclose(vertical_matrix(rotation, g, e), R, atol=1e-12)
        e2, v2 = act_vertical(rotation, g, (e, [0.0, 0.0, 1.0, 0.0]))
        assert np.allclose(v2[2:], R[:, 0], atol=1e-12)
        assert np.allclose(v2[:2], 0.0, atol=1e-12)


class TestJetAction:
    def test_transport_jet_hand_value(self, transport, rng):
        u, e = sample_compatible_jet(transport, rng)
        a = frame_of(u)
        w = jet_from_fiber_block(e, rng.standard_normal((2, 2)))
        out = act_jet(transport, u, w)
        # transport leaves fibers alone: v' = v a^-1
        assert np.allclose(out.fiber_block,
                           w.fiber_block @ np.linalg.inv(a), atol=1e-10)

    def test_jet_action_law(self, rotation, rng):
        G = rotation.G
        for _ in range(10):
            u, e = sample_compatible_jet(rotation, rng)
            v = sample_jet_element(
                G, rng, g=element_with_source(G, G.sample_element(rng),
                                              G.tau.eval(u.g)))
            w = jet_from_fiber_block(e, rng.standard_normal((2, 2)))
            lhs = act_jet(rotation, jg_multiply(G, v, u), w)
            rhs = act_jet(rotation, v, act_jet(rotation, u, w))
            assert np.allclose(lhs.coords(), rhs.coords(), atol=1e-9)

    def test_linjet_matches_jet_difference(self, rotation, rng):
        # the linearized action is the difference of two jet actions
        u, e = sample_compatible_jet(rotation, rng)
        blk = rng.standard_normal((2, 2))
        w1 = act_jet(rotation, u, jet_from_fiber_block(e, blk))
        w0 = act_jet(rotation, u, jet_from_fiber_block(e, np.zeros((2, 2))))
        lw = act_linjet(rotation, frame_of(u), u.g, LinJet(e, blk))
        assert np.allclose(lw.w, w1.fiber_block - w0.fiber_block,
                           atol=1e-10)


class TestCojetAction:
    def test_defining_pairing(self, rotation, rng):
        for _ in range(15):
            u, e = sample_compatible_jet(rotation, rng)
            det = np.linalg.det(frame_of(u))
            z = ExtendedCojetPoint(e[:2], e[2:], rng.standard_normal((2, 2)),
                                   rng.standard_normal())
            w = jet_from_fiber_block(e, rng.standard_normal((2, 2)))
            uz = act_extended_cojet(rotation, u, z)
            uw = act_jet(rotation, u, w)
            # <u.z, u.w> det(frame(u)) = <z, w>
            assert eval_extended(uz, uw) * det == pytest.approx(
                eval_extended(z, w), abs=1e-9)

    def test_ordinary_is_linear_part(self, rotation, rng):
        u, e = sample_compatible_jet(rotation, rng)
        z = ExtendedCojetPoint(e[:2], e[2:], rng.standard_normal((2, 2)),
                               0.7)
        uz = act_extended_cojet(rotation, u, z)
        w = act_ordinary_cojet(rotation, frame_of(u), u.g, linear_part(z))
        assert np.allclose(w.P, uz.P, atol=1e-10)
        assert np.allclose(w.e, uz.e, atol=1e-12)


class TestTangentAndTensor:
    def test_frame_covering(self, transport, rng):
        u, e = sample_compatible_jet(transport, rng)
        L = tangent_matrix(transport, u, e)
        v = rng.standard_normal(4)
        assert np.allclose((L @ v)[:2], frame_of(u) @ v[:2], atol=1e-10)

    def test_tensor_pairing_invariance(self, rotation, rng):
        u, e = sample_compatible_jet(rotation, rng)
        alpha = TensorPoint(e, 0, 1, rng.standard_normal(4))
        v = rng.standard_normal(4)
        e2, lv = act_tangent(rotation, u, (e, v))
        pushed = act_tensor(rotation, u, alpha)
        assert float(pushed.components @ lv) == pytest.approx(
            float(alpha.components @ v), abs=1e-10)

    def test_bad_tensor_shape(self):
        with pytest.raises(CompositionError):
            TensorPoint([0.0, 0.0, 0.0, 0.0], 1, 0, np.zeros((3,)))


class TestBisectionRepresentation:
    def test_spaces_consistent(self, transport, rng, square):
        f = SmoothMap(2, 2, lambda x: [x[0] + 0.05 * x[1] ** 2,
                                       x[1] - 0.1 * x[0]])
        beta = pair_bisection(transport.G, f)
        e = box_sampler(transport.E.total_box, rng, margin=0.2)
        out = apply_bisection(transport, beta, "E", e)
        assert np.allclose(out, act(transport, beta(e[:2]), e), atol=1e-12)
        z = ExtendedCojetPoint(e[:2], e[2:], rng.standard_normal((2, 2)),
                               0.3)
        uz = apply_bisection(transport, beta, "extended_cojet", z)
        assert uz.coords().shape == (9,)
        with pytest.raises(CompositionError):
            apply_bisection(transport, beta, "nope", e)


class TestFundamentalField:
    def test_matches_flow_derivative(self, rotation, rng):
        G = rotation.G
        alg = algebroid_of_groupoid(G)
        xi = AlgebroidSection.constant(G.base, [0.8])
        e = box_sampler(rotation.E.total_box, rng, margin=0.3)
        X = fundamental_vector_field(rotation, alg, xi, e)
        h = 1e-5
        gp = exponential(alg, xi, h, e[:2])
        gm = exponential(alg, xi, -h, e[:2])
        fd = (act(rotation, gp, e) - act(rotation, gm, e)) / (2 * h)
        assert np.allclose(X, fd, atol=1e-8)


def test_tensor_invariance_report(transport, rng):
    # the vertical metric dy.dy is invariant under plain transport
    def field(e):
        comp = np.zeros((4, 4))
        comp[2, 2] = comp[3, 3] = 1.0
        return TensorPoint(e, 0, 2, comp)

    def sampler(r):
        u, e = sample_compatible_jet(transport, r)
        # restrict to unimodular frames so the covariant slots see an
        # orthogonal base block
        return u, e

    rep = check_tensor_invariance(transport, field, "pointwise", sampler,
                                  n_samples=5, seed=3)
    assert set(rep) == {"property", "n_samples", "max_residual",
                        "argmax_sample"}
    assert rep["n_samples"] == 5


def test_second_order_cojet_map_at_center(square, bundle2, rng):
    from gnk.jet_groupoid import sample_second_order_element
    G = builtin_groupoid("pair", square)
    A = builtin_action("transport", G, bundle2)
    s = sample_second_order_element(G, rng)
    pm = second_order_cojet_map(A, s)
    x0 = np.asarray(G.sigma.eval(s.g))
    z = ExtendedCojetPoint(x0, [0.4, -0.1], rng.standard_normal((2, 2)),
                           0.2)
    # at the source point the map agrees with the plain cojet action
    assert np.allclose(pm(z.coords()),
                       act_extended_cojet(A, s.base, z).coords(),
                       atol=1e-12)
