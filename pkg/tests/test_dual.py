"""Dual-number engine: arithmetic laws, dispatcher, nesting, backends."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gnk import dual, _dual_py

finite = st.floats(min_value=-50.0, max_value=50.0,
                   allow_nan=False, allow_infinity=False)
nonzero = finite.filter(lambda v: abs(v) > 1e-3)


class TestDualArithmetic:
    @given(finite, finite, finite, finite)
    def test_sum_rule(self, a, da, b, db):
        s = dual.Dual(a, da) + dual.Dual(b, db)
        assert s.v == a + b and s.d == da + db

    @given(finite, finite, finite, finite)
    def test_product_rule(self, a, da, b, db):
        p = dual.Dual(a, da) * dual.Dual(b, db)
        assert p.v == pytest.approx(a * b)
        assert p.d == pytest.approx(a * db + b * da)

    @given(finite, finite, nonzero, finite)
    def test_quotient_rule(self, a, da, b, db):
        q = dual.Dual(a, da) / dual.Dual(b, db)
        assert q.v == pytest.approx(a / b)
        assert q.d == pytest.approx((da * b - a * db) / b ** 2)

    @given(finite)
    def test_chain_rule_trig(self, a):
        out = dual.sin(dual.cos(dual.Dual(a, 1.0)))
        assert out.v == pytest.approx(math.sin(math.cos(a)))
        assert out.d == pytest.approx(-math.cos(math.cos(a))
                                      * math.sin(a))

    @given(st.floats(min_value=0.1, max_value=20.0))
    def test_log_sqrt(self, a):
        out = dual.log(dual.sqrt(dual.Dual(a, 1.0)))
        assert out.d == pytest.approx(0.5 / a)


class TestJacobian:
    def test_matches_analytic(self):
        def f(x):
            return [x[0] * x[1], dual.exp(x[0]) + x[1] ** 3]

        x = [0.3, -0.7]
        jac = dual.jacobian(f, x, 2)
        expect = np.array([[x[1], x[0]],
                           [math.exp(x[0]), 3 * x[1] ** 2]])
        assert np.allclose(jac, expect, atol=1e-14)

    def test_directional(self):
        def f(x):
            return [dual.sin(x[0]) * x[1]]

        x, u = [0.4, 1.2], [0.5, -2.0]
        d = dual.directional(f, x, u)
        jac = dual.jacobian(f, x, 1)
        assert float(d[0]) == pytest.approx(float((jac @ u)[0]))

    def test_second_directional_symmetric(self):
        def f(x):
            return [x[0] ** 2 * dual.cos(x[1])]

        x = [0.7, 0.2]
        u, v = [1.0, 0.3], [-0.2, 1.5]
        duv = dual.second_directional(f, x, u, v)
        dvu = dual.second_directional(f, x, v, u)
        assert float(duv[0]) == pytest.approx(float(dvu[0]))

    def test_nested_differentiation(self):
        # hessian of x^3 y via jacobian-of-jacobian needs the leveled
        # engine underneath
        def grad(x):
            jac = dual.jacobian(lambda z: [z[0] ** 3 * z[1]], list(x), 1)
            return [jac[0, 0], jac[0, 1]]

        hess = dual.jacobian(grad, [2.0, 5.0], 2)
        hess = np.array([[float(h) for h in row] for row in hess])
        assert np.allclose(hess, [[60.0, 12.0], [12.0, 0.0]], atol=1e-10)


class TestBackends:
    def test_backend_flag(self):
        assert dual.BACKEND in ("compiled", "python")

    def test_pure_python_twin_agrees(self):
        a = dual.Dual(0.3, 1.0)
        b = _dual_py.Dual(0.3, 1.0)
        for out_c, out_p in [(a * a + a, b * b + b),
                             (1.0 / (a + 2.0), 1.0 / (b + 2.0))]:
            assert out_c.v == pytest.approx(out_p.v)
            assert out_c.d == pytest.approx(out_p.d)

    def test_dual2_second_derivative(self):
        # seed both directions along dx: duv is the pure second derivative
        x = dual.Dual2(0.5, 1.0, 1.0)
        out = x * x * x
        assert out.v == pytest.approx(0.125)
        assert out.du == pytest.approx(0.75)   # 3 x^2
        assert out.dv == pytest.approx(0.75)
        assert out.duv == pytest.approx(3.0)   # 6 x
