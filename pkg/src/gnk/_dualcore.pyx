# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: c_api_binop_methods=True
"""Compiled dual-number scalars.

Same API as gnk._dual_py (Dual, Dual2); this is the hot inner kernel for
forward-mode differentiation of chart maps with plain float inputs.
"""

from libc.math cimport sin, cos, tan, exp, log, sqrt, sinh, cosh, tanh, atan, pow

__all__ = ["Dual", "Dual2"]


cdef class Dual:
    cdef public double v
    cdef public double d

    def __init__(self, double v, double d=0.0):
        self.v = v
        self.d = d

    def __repr__(self):
        return "Dual(%r, %r)" % (self.v, self.d)

    def __add__(x, y):
        cdef Dual a, b, r
        r = Dual.__new__(Dual)
        if isinstance(x, Dual):
            a = <Dual> x
            if isinstance(y, Dual):
                b = <Dual> y
                r.v = a.v + b.v
                r.d = a.d + b.d
            elif isinstance(y, (int, float)):
                r.v = a.v + <double> y
                r.d = a.d
            else:
                return NotImplemented
        elif isinstance(x, (int, float)):
            b = <Dual> y
            r.v = <double> x + b.v
            r.d = b.d
        else:
            return NotImplemented
        return r

    def __sub__(x, y):
        cdef Dual a, b, r
        r = Dual.__new__(Dual)
        if isinstance(x, Dual):
            a = <Dual> x
            if isinstance(y, Dual):
                b = <Dual> y
                r.v = a.v - b.v
                r.d = a.d - b.d
            elif isinstance(y, (int, float)):
                r.v = a.v - <double> y
                r.d = a.d
            else:
                return NotImplemented
        elif isinstance(x, (int, float)):
            b = <Dual> y
            r.v = <double> x - b.v
            r.d = -b.d
        else:
            return NotImplemented
        return r

    def __mul__(x, y):
        cdef Dual a, b, r
        cdef double c
        r = Dual.__new__(Dual)
        if isinstance(x, Dual):
            a = <Dual> x
            if isinstance(y, Dual):
                b = <Dual> y
                r.v = a.v * b.v
                r.d = a.v * b.d + a.d * b.v
            elif isinstance(y, (int, float)):
                c = <double> y
                r.v = a.v * c
                r.d = a.d * c
            else:
                return NotImplemented
        elif isinstance(x, (int, float)):
            c = <double> x
            b = <Dual> y
            r.v = c * b.v
            r.d = c * b.d
        else:
            return NotImplemented
        return r

    def __truediv__(x, y):
        cdef Dual a, b, r
        cdef double c, iv
        r = Dual.__new__(Dual)
        if isinstance(x, Dual):
            a = <Dual> x
            if isinstance(y, Dual):
                b = <Dual> y
                iv = 1.0 / b.v
                r.v = a.v * iv
                r.d = (a.d - a.v * iv * b.d) * iv
            elif isinstance(y, (int, float)):
                c = 1.0 / <double> y
                r.v = a.v * c
                r.d = a.d * c
            else:
                return NotImplemented
        elif isinstance(x, (int, float)):
            c = <double> x
            b = <Dual> y
            iv = 1.0 / b.v
            r.v = c * iv
            r.d = -c * b.d * iv * iv
        else:
            return NotImplemented
        return r

    def __neg__(self):
        cdef Dual r = Dual.__new__(Dual)
        r.v = -self.v
        r.d = -self.d
        return r

    def __pos__(self):
        return self

    def __pow__(x, n, z):
        cdef Dual a, r
        cdef double e
        if not isinstance(x, Dual):
            if not isinstance(x, (int, float)):
                return NotImplemented
            return ((<Dual> n) * log(<double> x)).exp()
        a = <Dual> x
        if isinstance(n, Dual):
            return (a.log() * <Dual> n).exp()
        if not isinstance(n, (int, float)):
            return NotImplemented
        e = <double> n
        r = Dual.__new__(Dual)
        if e == 2.0:
            r.v = a.v * a.v
            r.d = 2.0 * a.v * a.d
        else:
            r.v = pow(a.v, e)
            r.d = e * pow(a.v, e - 1.0) * a.d
        return r

    def __abs__(self):
        if self.v < 0:
            return self.__neg__()
        return self

    def __richcmp__(x, y, int op):
        cdef double xv, yv
        xv = (<Dual> x).v if isinstance(x, Dual) else <double> x
        yv = (<Dual> y).v if isinstance(y, Dual) else <double> y
        if op == 0:
            return xv < yv
        elif op == 1:
            return xv <= yv
        elif op == 2:
            return xv == yv
        elif op == 3:
            return xv != yv
        elif op == 4:
            return xv > yv
        else:
            return xv >= yv

    cdef inline Dual _mk(self, double v, double d):
        cdef Dual r = Dual.__new__(Dual)
        r.v = v
        r.d = d
        return r

    def sin(self):
        return self._mk(sin(self.v), cos(self.v) * self.d)

    def cos(self):
        return self._mk(cos(self.v), -sin(self.v) * self.d)

    def tan(self):
        cdef double t = tan(self.v)
        return self._mk(t, (1.0 + t * t) * self.d)

    def exp(self):
        cdef double e = exp(self.v)
        return self._mk(e, e * self.d)

    def log(self):
        return self._mk(log(self.v), self.d / self.v)

    def sqrt(self):
        cdef double s = sqrt(self.v)
        return self._mk(s, 0.5 * self.d / s)

    def sinh(self):
        return self._mk(sinh(self.v), cosh(self.v) * self.d)

    def cosh(self):
        return self._mk(cosh(self.v), sinh(self.v) * self.d)

    def tanh(self):
        cdef double t = tanh(self.v)
        return self._mk(t, (1.0 - t * t) * self.d)

    def atan(self):
        return self._mk(atan(self.v), self.d / (1.0 + self.v * self.v))


cdef class Dual2:
    """Two-seed truncated Taylor scalar for mixed second derivatives."""

    cdef public double v
    cdef public double du
    cdef public double dv
    cdef public double duv

    def __init__(self, double v, double du=0.0, double dv=0.0, double duv=0.0):
        self.v = v
        self.du = du
        self.dv = dv
        self.duv = duv

    def __repr__(self):
        return "Dual2(%r, %r, %r, %r)" % (self.v, self.du, self.dv, self.duv)

    cdef inline Dual2 _mk(self, double v, double du, double dv, double duv):
        cdef Dual2 r = Dual2.__new__(Dual2)
        r.v = v
        r.du = du
        r.dv = dv
        r.duv = duv
        return r

    def __add__(x, y):
        cdef Dual2 a, b
        if isinstance(x, Dual2):
            a = <Dual2> x
            if isinstance(y, Dual2):
                b = <Dual2> y
                return a._mk(a.v + b.v, a.du + b.du, a.dv + b.dv, a.duv + b.duv)
            if isinstance(y, (int, float)):
                return a._mk(a.v + <double> y, a.du, a.dv, a.duv)
            return NotImplemented
        if not isinstance(x, (int, float)):
            return NotImplemented
        b = <Dual2> y
        return b._mk(<double> x + b.v, b.du, b.dv, b.duv)

    def __sub__(x, y):
        cdef Dual2 a, b
        if isinstance(x, Dual2):
            a = <Dual2> x
            if isinstance(y, Dual2):
                b = <Dual2> y
                return a._mk(a.v - b.v, a.du - b.du, a.dv - b.dv, a.duv - b.duv)
            if isinstance(y, (int, float)):
                return a._mk(a.v - <double> y, a.du, a.dv, a.duv)
            return NotImplemented
        if not isinstance(x, (int, float)):
            return NotImplemented
        b = <Dual2> y
        return b._mk(<double> x - b.v, -b.du, -b.dv, -b.duv)

    def __mul__(x, y):
        cdef Dual2 a, b
        cdef double c
        if isinstance(x, Dual2):
            a = <Dual2> x
            if isinstance(y, Dual2):
                b = <Dual2> y
                return a._mk(
                    a.v * b.v,
                    a.v * b.du + a.du * b.v,
                    a.v * b.dv + a.dv * b.v,
                    a.v * b.duv + a.du * b.dv + a.dv * b.du + a.duv * b.v,
                )
            if isinstance(y, (int, float)):
                c = <double> y
                return a._mk(a.v * c, a.du * c, a.dv * c, a.duv * c)
            return NotImplemented
        if not isinstance(x, (int, float)):
            return NotImplemented
        c = <double> x
        b = <Dual2> y
        return b._mk(b.v * c, b.du * c, b.dv * c, b.duv * c)

    cdef Dual2 _recip(self):
        cdef double iv = 1.0 / self.v
        cdef double iv2 = iv * iv
        return self._mk(iv, -self.du * iv2, -self.dv * iv2,
                        (2.0 * self.du * self.dv * iv - self.duv) * iv2)

    def __truediv__(x, y):
        cdef Dual2 a, b
        cdef double c
        if isinstance(x, Dual2):
            a = <Dual2> x
            if isinstance(y, Dual2):
                return a * (<Dual2> y)._recip()
            if isinstance(y, (int, float)):
                c = 1.0 / <double> y
                return a._mk(a.v * c, a.du * c, a.dv * c, a.duv * c)
            return NotImplemented
        if not isinstance(x, (int, float)):
            return NotImplemented
        return (<Dual2> y)._recip() * x

    def __neg__(self):
        return self._mk(-self.v, -self.du, -self.dv, -self.duv)

    def __pos__(self):
        return self

    cdef inline Dual2 _lift(self, double f, double d1, double d2):
        return self._mk(f, d1 * self.du, d1 * self.dv,
                        d1 * self.duv + d2 * self.du * self.dv)

    def __pow__(x, n, z):
        cdef Dual2 a
        cdef double e
        if not isinstance(x, Dual2):
            if not isinstance(x, (int, float)):
                return NotImplemented
            return ((<Dual2> n) * log(<double> x)).exp()
        a = <Dual2> x
        if isinstance(n, Dual2):
            return (a.log() * <Dual2> n).exp()
        if not isinstance(n, (int, float)):
            return NotImplemented
        e = <double> n
        if e == 1.0:
            return a
        return a._lift(pow(a.v, e), e * pow(a.v, e - 1.0),
                       e * (e - 1.0) * pow(a.v, e - 2.0))

    def __abs__(self):
        if self.v < 0:
            return self.__neg__()
        return self

    def __richcmp__(x, y, int op):
        cdef double xv, yv
        xv = (<Dual2> x).v if isinstance(x, Dual2) else <double> x
        yv = (<Dual2> y).v if isinstance(y, Dual2) else <double> y
        if op == 0:
            return xv < yv
        elif op == 1:
            return xv <= yv
        elif op == 2:
            return xv == yv
        elif op == 3:
            return xv != yv
        elif op == 4:
            return xv > yv
        else:
            return xv >= yv

    def sin(self):
        return self._lift(sin(self.v), cos(self.v), -sin(self.v))

    def cos(self):
        return self._lift(cos(self.v), -sin(self.v), -cos(self.v))

    def tan(self):
        cdef double t = tan(self.v)
        cdef double d = 1.0 + t * t
        return self._lift(t, d, 2.0 * t * d)

    def exp(self):
        cdef double e = exp(self.v)
        return self._lift(e, e, e)

    def log(self):
        cdef double iv = 1.0 / self.v
        return self._lift(log(self.v), iv, -iv * iv)

    def sqrt(self):
        cdef double s = sqrt(self.v)
        return self._lift(s, 0.5 / s, -0.25 / (s * self.v))

    def sinh(self):
        return self._lift(sinh(self.v), cosh(self.v), sinh(self.v))

    def cosh(self):
        return self._lift(cosh(self.v), sinh(self.v), cosh(self.v))

    def tanh(self):
        cdef double t = tanh(self.v)
        cdef double d = 1.0 - t * t
        return self._lift(t, d, -2.0 * t * d)

    def atan(self):
        cdef double q = 1.0 / (1.0 + self.v * self.v)
        return self._lift(atan(self.v), q, -2.0 * self.v * q * q)
