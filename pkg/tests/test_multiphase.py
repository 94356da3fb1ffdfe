"""Multiphase geometry: canonical forms, Legendre maps, field residuals."""

import numpy as np
import pytest

from gnk.errors import CompositionError, NotHyperregularError
from gnk.grid import GridSection
from gnk.jet_bundle import ExtendedCojetPoint, jet_from_fiber_block
from gnk.multiphase import (Hamiltonian, HorizontalFormPoint, Lagrangian,
                            action_functional, builtin_lagrangian,
                            cojet_form_iso, dedonder_hamiltonian,
                            dedonder_weyl_residual,
                            euler_lagrange_residual, form_cojet_iso,
                            horizontal_form_value, legendre_full,
                            legendre_linear, omega_H_eval, omega_eval,
                            theta_H_eval, theta_eval)
from gnk.manifold_bundle import ChartManifold, trivial_bundle
from gnk.smooth import SmoothMap, box_sampler


def lam_dim(n, k):
    return n + k + k * n + 1


def point_from_coords(zc, n, k):
    return ExtendedCojetPoint(zc[:n], zc[n:n + k],
                              zc[n + k:n + k + k * n].reshape(k, n),
                              zc[n + k + k * n])


class TestHorizontalForms:
    def test_hand_value(self):
        # n = 2, k = 1: alpha = P00 dy ^ dx2 + P01 dx1 ^ dy + c dx1 ^ dx2
        P = np.array([[2.0, 3.0]])
        c = 5.0
        v1 = np.array([1.0, 0.0, 4.0])   # (dx1, dx2, dy) components
        v2 = np.array([0.0, 1.0, 7.0])
        # det with row dx1 -> dy: [[4,7],[0,1]] = 4; row dx2 -> dy:
        # [[1,0],[4,7]] = 7; volume det = 1
        expect = 2.0 * 4.0 + 3.0 * 7.0 + 5.0
        got = horizontal_form_value(2, 1, P, c, [v1, v2])
        assert got == pytest.approx(expect)

    def test_antisymmetry(self, rng):
        P = rng.standard_normal((2, 2))
        vs = [rng.standard_normal(4) for _ in range(2)]
        a = horizontal_form_value(2, 2, P, 1.3, vs)
        b = horizontal_form_value(2, 2, P, 1.3, vs[::-1])
        assert a == pytest.approx(-b)

    def test_iso_roundtrip(self, rng):
        z = ExtendedCojetPoint(rng.standard_normal(2),
                               rng.standard_normal(2),
                               rng.standard_normal((2, 2)), 0.4)
        back = form_cojet_iso(cojet_form_iso(z))
        assert np.allclose(back.coords(), z.coords(), atol=0.0)


class TestCanonicalForms:
    def theta_at(self, zc, n, k, vectors):
        return theta_eval(point_from_coords(zc, n, k), vectors)

    def test_omega_is_minus_dtheta(self, rng):
        # FD exterior derivative with constant (coordinate-frame) vector
        # fields: d theta (v_0..v_n) = sum_i (-1)^i D_{v_i} theta(.. i ..)
        n, k = 2, 2
        d = lam_dim(n, k)
        h = 1e-5
        for _ in range(5):
            zc = rng.standard_normal(d)
            vs = [rng.standard_normal(d) for _ in range(n + 1)]
            dtheta = 0.0
            for i in range(n + 1):
                rest = [v for j, v in enumerate(vs) if j != i]
                fp = self.theta_at(zc + h * vs[i], n, k, rest)
                fm = self.theta_at(zc - h * vs[i], n, k, rest)
                dtheta += (-1.0) ** i * (fp - fm) / (2.0 * h)
            om = omega_eval(point_from_coords(zc, n, k), vs)
            assert om == pytest.approx(-dtheta, abs=1e-6)

    def test_theta_depends_only_on_projection(self, rng):
        n, k = 2, 1
        zc = rng.standard_normal(lam_dim(n, k))
        alpha = point_from_coords(zc, n, k)
        vs = [rng.standard_normal(lam_dim(n, k)) for _ in range(n)]
        bumped = [v.copy() for v in vs]
        bumped[0][n + k:] += 10.0   # P- and c-components are ignored
        assert theta_eval(alpha, vs) == pytest.approx(
            theta_eval(alpha, bumped))

    def test_hamiltonian_pullbacks(self, rng):
        # theta_H / omega_H agree with pushing vectors through the section
        M = ChartManifold(2, [(-1, 1), (-1, 1)])
        E = trivial_bundle(M, 1, half_width=3.0)
        L = builtin_lagrangian("klein_gordon", E, mass=0.5,
                               metric=np.diag([1.0, -1.0]))
        H = dedonder_hamiltonian(L)
        zc = rng.standard_normal(2 + 1 + 2)
        z = ExtendedCojetPoint(zc[:2], zc[2:3], zc[3:].reshape(1, 2), 0.0)
        from gnk.jet_bundle import linear_part
        w = linear_part(z)
        vs = [rng.standard_normal(5) for _ in range(3)]
        assert np.isfinite(omega_H_eval(H, w, vs))
        assert np.isfinite(theta_H_eval(H, w, vs[:2]))


class TestLegendre:
    def setup_method(self):
        M = ChartManifold(2, [(-1, 1), (-1, 1)])
        self.E = trivial_bundle(M, 1, half_width=3.0)
        self.eta = np.diag([1.0, -1.0])
        self.m = 0.5
        self.L = builtin_lagrangian("klein_gordon", self.E, mass=self.m,
                                    metric=self.eta)

    def test_hand_values(self):
        v = np.array([[0.7, -0.3]])
        y = 1.2
        u = jet_from_fiber_block([0.1, 0.2, y], v)
        z = legendre_full(self.L, u)
        # P = eta^-1 v, here (v0, -v1)
        assert np.allclose(z.P, [[0.7, 0.3]], atol=1e-12)
        ell = 0.5 * (0.7 ** 2 - (-0.3) ** 2) - 0.5 * self.m ** 2 * y ** 2
        assert z.c == pytest.approx(ell - float(np.sum(z.P * v)))

    def test_dedonder_closed_form(self, rng):
        H = dedonder_hamiltonian(self.L, rng=rng)
        for _ in range(5):
            e = box_sampler(self.E.total_box, rng, margin=0.1)
            P = rng.standard_normal((1, 2))
            from gnk.jet_bundle import OrdinaryCojetPoint
            z = OrdinaryCojetPoint(e[:2], e[2:], P)
            expect = 0.5 * float((P @ self.eta @ P.T)[0, 0]) \
                + 0.5 * self.m ** 2 * e[2] ** 2
            assert H.value(z) == pytest.approx(expect, abs=1e-10)

    def test_h_of_legendre_image(self, rng):
        H = dedonder_hamiltonian(self.L)
        u = jet_from_fiber_block(box_sampler(self.E.total_box, rng),
                                 rng.standard_normal((1, 2)))
        z = legendre_linear(self.L, u)
        pv = float(np.sum(z.P * u.fiber_block))
        assert H.value(z) == pytest.approx(pv - self.L.value(u), abs=1e-10)

    def test_hyperregularity_gate(self, rng):
        assert self.L.hyperregular(rng)
        degenerate = Lagrangian(
            self.E, SmoothMap(5, 1, lambda c: [c[3] + c[4]]), name="lin")
        assert not degenerate.hyperregular(rng)
        with pytest.raises(NotHyperregularError):
            dedonder_hamiltonian(degenerate, rng=rng)


class TestGridResiduals:
    def make_solution(self, r):
        # exact KG standing wave on the periodic square [0,1)^2:
        # y = cos(w t) sin(2 pi x), w^2 = (2 pi)^2 + m^2
        m = 0.5
        w = np.sqrt((2 * np.pi) ** 2 + m ** 2)
        dx = 1.0 / r
        t = np.arange(r) * dx
        x = np.arange(r) * dx
        T, X = np.meshgrid(t, x, indexing="ij")
        y = (np.cos(w * T) * np.sin(2 * np.pi * X))[None]
        phi = GridSection([0.0, 0.0], [dx, dx], (r, r), y,
                          periodic=(True, True))
        M = ChartManifold(2, [(0.0, 1.0), (0.0, 1.0)])
        E = trivial_bundle(M, 1, half_width=3.0)
        L = builtin_lagrangian("klein_gordon", E, mass=m,
                               metric=np.diag([1.0, -1.0]))
        return L, phi

    def residual_norm(self, r):
        L, phi = self.make_solution(r)
        worst = 0.0
        # same physical locations at every resolution
        for idx in [(r // 4, r // 8), (3 * r // 8, r // 2)]:
            worst = max(worst, float(np.max(np.abs(
                euler_lagrange_residual(L, phi, idx)))))
        return worst

    def test_el_residual_second_order(self):
        r1 = self.residual_norm(16)
        r2 = self.residual_norm(32)
        assert r1 / r2 == pytest.approx(4.0, rel=0.35)

    def test_dw_residual_on_legendre_momenta(self):
        L, phi = self.make_solution(32)
        H = dedonder_hamiltonian(L)
        n, k, shape = phi.n, phi.k, phi.shape
        P = np.zeros((k, n) + shape)
        eta = np.diag([1.0, -1.0])
        for idx in np.ndindex(*shape):
            P[(slice(None), slice(None)) + idx] = phi.fiber_jet(idx) @ eta
        phi.P = P
        res = dedonder_weyl_residual(H, phi, (5, 7))
        assert np.max(np.abs(res)) < 0.05   # O(dx^2) at dx = 1/32

    def test_action_functional_hand_value(self):
        # constant field y = y0 on a small non-periodic grid: the
        # integrand is -m^2 y0^2 / 2 per unit cell over interior nodes
        m, y0 = 0.5, 1.5
        r = 6
        dx = 0.1
        y = np.full((1, r, r), y0)
        phi = GridSection([0.0, 0.0], [dx, dx], (r, r), y)
        M = ChartManifold(2, [(-1.0, 1.0), (-1.0, 1.0)])
        E = trivial_bundle(M, 1, half_width=3.0)
        L = builtin_lagrangian("klein_gordon", E, mass=m,
                               metric=np.diag([1.0, -1.0]))
        S = action_functional(L, phi)
        n_int = (r - 2) ** 2
        assert S == pytest.approx(-0.5 * m ** 2 * y0 ** 2 * dx * dx * n_int)
