"""Jets of bundle sections, cojet pairings and holonomy predicates."""

import numpy as np
import pytest

from gnk.errors import NotASectionError
from gnk.jet_bundle import (Connection, ExtendedCojetPoint, LinJet,
                            OrdinaryCojetPoint, covariant_derivative,
                            eval_extended, eval_ordinary,
                            is_prolongation, jet_from_fiber_block,
                            jet_of_section, jet_pushforward, linear_part,
                            second_jet_of_section, semiholonomic_split)
from gnk.manifold_bundle import BundleMap
from gnk.smooth import SmoothMap, box_sampler


def sine_section(E):
    """phi(x) = (x, sin(2x0) + x1, x0 x1)."""
    from gnk import dual

    def body(x):
        return [x[0], x[1], dual.sin(2.0 * x[0]) + x[1], x[0] * x[1]]

    return SmoothMap(2, 4, body, name="phi")


class TestJets:
    def test_jet_of_section_matches_hand_derivative(self, bundle2, rng):
        phi = sine_section(bundle2)
        x = box_sampler(bundle2.base.box, rng, margin=0.1)
        j = jet_of_section(bundle2, phi, x)
        expect = np.array([[2.0 * np.cos(2.0 * x[0]), 1.0],
                           [x[1], x[0]]])
        assert np.allclose(j.fiber_block, expect, atol=1e-12)
        assert j.n == 2 and j.k == 2
        assert np.allclose(j.coords()[:4], phi.eval(x))

    def test_not_a_section(self, bundle2):
        bad = SmoothMap(2, 4, lambda x: [x[0] + 1.0, x[1], 0.0, 0.0])
        with pytest.raises(NotASectionError):
            jet_of_section(bundle2, bad, [0.0, 0.0])

    def test_second_jet_symmetric(self, bundle2, rng):
        phi = sine_section(bundle2)
        x = box_sampler(bundle2.base.box, rng, margin=0.1)
        s = second_jet_of_section(bundle2, phi, x)
        assert np.allclose(s.W, s.W.transpose(0, 2, 1), atol=1e-12)
        # hand value: d^2/dx0^2 of sin(2 x0) is -4 sin(2 x0)
        assert s.W[0, 0, 0] == pytest.approx(-4.0 * np.sin(2.0 * x[0]))
        # mixed derivative of x0 x1 is 1
        assert s.W[1, 0, 1] == pytest.approx(1.0)
        w_sym, w_alt = semiholonomic_split(s)
        assert np.allclose(w_sym, s.W, atol=1e-12)
        assert np.allclose(w_alt, 0.0, atol=1e-12)

    def test_pushforward(self, bundle2, rng):
        fm = SmoothMap(4, 2, lambda e: [2.0 * e[2] + e[0], e[3] - e[2]])
        f = BundleMap(bundle2, bundle2, fm)
        phi = sine_section(bundle2)
        x = box_sampler(bundle2.base.box, rng, margin=0.1)
        j = jet_of_section(bundle2, phi, x)
        pushed = jet_pushforward(f, j)
        # oracle: jet of the composed section f o phi
        comp = SmoothMap(2, 4, lambda z: f.map.body(phi.body(list(z))))
        j2 = jet_of_section(bundle2, comp, x)
        assert np.allclose(pushed.coords(), j2.coords(), atol=1e-10)


class TestCojets:
    def test_extended_pairing(self):
        z = ExtendedCojetPoint([0.1, 0.2], [1.0, -1.0],
                               [[1.0, 2.0], [3.0, 4.0]], 0.5)
        u = jet_from_fiber_block([0.1, 0.2, 1.0, -1.0],
                                 [[1.0, 0.0], [0.0, 2.0]])
        assert eval_extended(z, u) == pytest.approx(1.0 + 8.0 + 0.5)
        assert np.allclose(z.e, [0.1, 0.2, 1.0, -1.0])

    def test_linear_part_and_ordinary(self):
        z = ExtendedCojetPoint([0.0, 0.0], [0.0, 0.0],
                               [[1.0, -1.0], [0.5, 2.0]], 7.0)
        w = linear_part(z)
        assert isinstance(w, OrdinaryCojetPoint)
        lj = LinJet([0.0] * 4, [[2.0, 1.0], [1.0, 1.0]])
        assert eval_ordinary(w, lj) == pytest.approx(2.0 - 1.0 + 0.5 + 2.0)


class TestConnection:
    def test_covariant_derivative(self, bundle2, rng):
        # flat connection gamma = 0: covariant derivative is the jet block
        gamma0 = SmoothMap(4, 4, lambda e: [0.0] * 4)
        conn = Connection(bundle2, gamma0)
        phi = sine_section(bundle2)
        x = box_sampler(bundle2.base.box, rng, margin=0.1)
        d = covariant_derivative(bundle2, phi, conn, x)
        j = jet_of_section(bundle2, phi, x)
        assert np.allclose(d.w, j.fiber_block, atol=1e-12)
        # constant nonzero connection shifts it
        gamma1 = SmoothMap(4, 4, lambda e: [1.0, 0.0, 0.0, 1.0])
        d1 = covariant_derivative(bundle2, phi,
                                  Connection(bundle2, gamma1), x)
        assert np.allclose(d1.w, j.fiber_block - np.eye(2), atol=1e-12)


class TestHolonomy:
    def test_is_prolongation(self, bundle2, rng):
        from gnk import dual
        phi = sine_section(bundle2)

        def good_body(x):
            e = phi.body(list(x))
            v = [2.0 * dual.cos(2.0 * x[0]), 1.0, x[1], x[0]]
            return list(e) + v

        good = SmoothMap(2, 8, good_body)
        x = box_sampler(bundle2.base.box, rng, margin=0.1)
        assert is_prolongation(bundle2, good, x)

        def bad_body(x):
            out = good_body(x)
            out[4] = out[4] + 0.3
            return out

        assert not is_prolongation(bundle2, SmoothMap(2, 8, bad_body), x)
