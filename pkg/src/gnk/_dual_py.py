"""Pure-Python dual-number scalars (fallback for the compiled kernel).

``Dual`` carries a value and one first-derivative coefficient; ``Dual2``
carries the mixed second-order coefficients needed for a bilinear second
directional derivative.  Both hold plain C doubles conceptually -- anything
fancier (nesting, object coefficients) lives in :mod:`gnk.dual`.
"""

import math

__all__ = ["Dual", "Dual2"]


class Dual:
    """First-order dual number ``v + d*eps`` with ``eps**2 == 0``."""

    __slots__ = ("v", "d")

    def __init__(self, v, d=0.0):
        self.v = float(v)
        self.d = float(d)

    def __repr__(self):
        return "Dual(%r, %r)" % (self.v, self.d)

    def __add__(self, other):
        if isinstance(other, Dual):
            return Dual(self.v + other.v, self.d + other.d)
        if isinstance(other, (int, float)):
            return Dual(self.v + other, self.d)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Dual):
            return Dual(self.v - other.v, self.d - other.d)
        if isinstance(other, (int, float)):
            return Dual(self.v - other, self.d)
        return NotImplemented

    def __rsub__(self, other):
        return Dual(other - self.v, -self.d)

    def __mul__(self, other):
        if isinstance(other, Dual):
            return Dual(self.v * other.v, self.v * other.d + self.d * other.v)
        if isinstance(other, (int, float)):
            return Dual(self.v * other, self.d * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Dual):
            iv = 1.0 / other.v
            return Dual(self.v * iv, (self.d - self.v * iv * other.d) * iv)
        if isinstance(other, (int, float)):
            return Dual(self.v / other, self.d / other)
        return NotImplemented

    def __rtruediv__(self, other):
        iv = 1.0 / self.v
        return Dual(other * iv, -other * self.d * iv * iv)

    def __neg__(self):
        return Dual(-self.v, -self.d)

    def __pos__(self):
        return self

    def __pow__(self, n):
        if isinstance(n, Dual):
            return (self.log() * n).exp()
        if not isinstance(n, (int, float)):
            return NotImplemented
        if n == 2:
            return Dual(self.v * self.v, 2.0 * self.v * self.d)
        return Dual(self.v ** n, n * self.v ** (n - 1) * self.d)

    def __rpow__(self, base):
        return (self * math.log(base)).exp()

    def __abs__(self):
        return Dual(-self.v, -self.d) if self.v < 0 else self

    # comparisons act on the real part, so generic pivoting code works
    def __lt__(self, other):
        return self.v < (other.v if isinstance(other, Dual) else other)

    def __le__(self, other):
        return self.v <= (other.v if isinstance(other, Dual) else other)

    def __gt__(self, other):
        return self.v > (other.v if isinstance(other, Dual) else other)

    def __ge__(self, other):
        return self.v >= (other.v if isinstance(other, Dual) else other)

    def sin(self):
        return Dual(math.sin(self.v), math.cos(self.v) * self.d)

    def cos(self):
        return Dual(math.cos(self.v), -math.sin(self.v) * self.d)

    def tan(self):
        t = math.tan(self.v)
        return Dual(t, (1.0 + t * t) * self.d)

    def exp(self):
        e = math.exp(self.v)
        return Dual(e, e * self.d)

    def log(self):
        return Dual(math.log(self.v), self.d / self.v)

    def sqrt(self):
        s = math.sqrt(self.v)
        return Dual(s, 0.5 * self.d / s)

    def sinh(self):
        return Dual(math.sinh(self.v), math.cosh(self.v) * self.d)

    def cosh(self):
        return Dual(math.cosh(self.v), math.sinh(self.v) * self.d)

    def tanh(self):
        t = math.tanh(self.v)
        return Dual(t, (1.0 - t * t) * self.d)

    def atan(self):
        return Dual(math.atan(self.v), self.d / (1.0 + self.v * self.v))


class Dual2:
    """Two-seed truncated Taylor scalar for mixed second derivatives.

    Tracks ``v + du*eu + dv*ev + duv*eu*ev`` with ``eu**2 == ev**2 == 0``;
    the ``duv`` slot of a function value is the bilinear second directional
    derivative along the two seed directions.
    """

    __slots__ = ("v", "du", "dv", "duv")

    def __init__(self, v, du=0.0, dv=0.0, duv=0.0):
        self.v = float(v)
        self.du = float(du)
        self.dv = float(dv)
        self.duv = float(duv)

    def __repr__(self):
        return "Dual2(%r, %r, %r, %r)" % (self.v, self.du, self.dv, self.duv)

    def __add__(self, other):
        if isinstance(other, Dual2):
            return Dual2(self.v + other.v, self.du + other.du,
                         self.dv + other.dv, self.duv + other.duv)
        if isinstance(other, (int, float)):
            return Dual2(self.v + other, self.du, self.dv, self.duv)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Dual2):
            return Dual2(self.v - other.v, self.du - other.du,
                         self.dv - other.dv, self.duv - other.duv)
        if isinstance(other, (int, float)):
            return Dual2(self.v - other, self.du, self.dv, self.duv)
        return NotImplemented

    def __rsub__(self, other):
        return Dual2(other - self.v, -self.du, -self.dv, -self.duv)

    def __mul__(self, other):
        if isinstance(other, Dual2):
            return Dual2(
                self.v * other.v,
                self.v * other.du + self.du * other.v,
                self.v * other.dv + self.dv * other.v,
                self.v * other.duv + self.du * other.dv
                + self.dv * other.du + self.duv * other.v,
            )
        if isinstance(other, (int, float)):
            return Dual2(self.v * other, self.du * other,
                         self.dv * other, self.duv * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Dual2):
            return self * other._recip()
        if isinstance(other, (int, float)):
            return Dual2(self.v / other, self.du / other,
                         self.dv / other, self.duv / other)
        return NotImplemented

    def __rtruediv__(self, other):
        return self._recip() * other

    def _recip(self):
        iv = 1.0 / self.v
        iv2 = iv * iv
        return Dual2(iv, -self.du * iv2, -self.dv * iv2,
                     (2.0 * self.du * self.dv * iv - self.duv) * iv2)

    def __neg__(self):
        return Dual2(-self.v, -self.du, -self.dv, -self.duv)

    def __pos__(self):
        return self

    def _lift(self, f, d1, d2):
        return Dual2(f, d1 * self.du, d1 * self.dv,
                     d1 * self.duv + d2 * self.du * self.dv)

    def __pow__(self, n):
        if isinstance(n, Dual2):
            return (self.log() * n).exp()
        if not isinstance(n, (int, float)):
            return NotImplemented
        return self._lift(self.v ** n, n * self.v ** (n - 1),
                          n * (n - 1) * self.v ** (n - 2) if n != 1 else 0.0)

    def __rpow__(self, base):
        return (self * math.log(base)).exp()

    def __abs__(self):
        return -self if self.v < 0 else self

    def __lt__(self, other):
        return self.v < (other.v if isinstance(other, Dual2) else other)

    def __le__(self, other):
        return self.v <= (other.v if isinstance(other, Dual2) else other)

    def __gt__(self, other):
        return self.v > (other.v if isinstance(other, Dual2) else other)

    def __ge__(self, other):
        return self.v >= (other.v if isinstance(other, Dual2) else other)

    def sin(self):
        s, c = math.sin(self.v), math.cos(self.v)
        return self._lift(s, c, -s)

    def cos(self):
        s, c = math.sin(self.v), math.cos(self.v)
        return self._lift(c, -s, -c)

    def tan(self):
        t = math.tan(self.v)
        d = 1.0 + t * t
        return self._lift(t, d, 2.0 * t * d)

    def exp(self):
        e = math.exp(self.v)
        return self._lift(e, e, e)

    def log(self):
        iv = 1.0 / self.v
        return self._lift(math.log(self.v), iv, -iv * iv)

    def sqrt(self):
        s = math.sqrt(self.v)
        return self._lift(s, 0.5 / s, -0.25 / (s * self.v))

    def sinh(self):
        sh, ch = math.sinh(self.v), math.cosh(self.v)
        return self._lift(sh, ch, sh)

    def cosh(self):
        sh, ch = math.sinh(self.v), math.cosh(self.v)
        return self._lift(ch, sh, ch)

    def tanh(self):
        t = math.tanh(self.v)
        d = 1.0 - t * t
        return self._lift(t, d, -2.0 * t * d)

    def atan(self):
        q = 1.0 / (1.0 + self.v * self.v)
        return self._lift(math.atan(self.v), q, -2.0 * self.v * q * q)
