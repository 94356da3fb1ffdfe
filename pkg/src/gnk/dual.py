"""Forward-mode differentiation for chart maps.

Two scalar engines share one API:

* ``Dual`` / ``Dual2`` -- flat scalars with float coefficients, used when
  every input is a plain number.  A compiled kernel (``gnk._dualcore``) is
  preferred; the pure-Python twin in ``gnk._dual_py`` is the fallback.
* ``GDual`` -- a leveled dual with arbitrary scalar coefficients, used for
  nested differentiation (e.g. differentiating a map whose body itself
  computes a Jacobian).  Each call to :func:`jacobian` with non-float
  inputs grabs a fresh level; scalars at a lower level are treated as
  constants by a higher one, so perturbations never get confused.

:func:`jacobian` and :func:`second_directional` dispatch between the two
engines automatically.
"""

import itertools
import math
import threading

import numpy as np

try:
    from gnk._dualcore import Dual, Dual2
    BACKEND = "compiled"
except ImportError:  # pragma: no cover - exercised only on pure installs
    from gnk._dual_py import Dual, Dual2
    BACKEND = "python"

__all__ = [
    "BACKEND", "Dual", "Dual2", "GDual",
    "sin", "cos", "tan", "exp", "log", "sqrt", "sinh", "cosh", "tanh", "atan",
    "real", "jacobian", "second_directional", "directional",
]

_level_counter = itertools.count(1)

_NUMS = (int, float)

# The flat Dual/Dual2 fast path is only safe at the outermost level of
# differentiation: a nested call sharing the same Dual class would confuse
# its perturbation with the enclosing one.  Track the active depth so any
# nested call switches to the leveled GDual engine.
_active = threading.local()


def _depth():
    return getattr(_active, "depth", 0)


class _entered:
    def __enter__(self):
        _active.depth = _depth() + 1

    def __exit__(self, *exc):
        _active.depth -= 1


class GDual:
    """Leveled dual number with generic (possibly dual) coefficients."""

    __slots__ = ("v", "d", "level")

    def __init__(self, v, d, level):
        self.v = v
        self.d = d
        self.level = level

    def __repr__(self):
        return "GDual(%r, %r, level=%d)" % (self.v, self.d, self.level)

    def __add__(self, other):
        if isinstance(other, GDual):
            if other.level == self.level:
                return GDual(self.v + other.v, self.d + other.d, self.level)
            if other.level > self.level:
                return GDual(self + other.v, other.d, other.level)
        return GDual(self.v + other, self.d, self.level)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return GDual(-self.v, -self.d, self.level)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if isinstance(other, GDual):
            if other.level == self.level:
                return GDual(self.v * other.v,
                             self.v * other.d + self.d * other.v, self.level)
            if other.level > self.level:
                return GDual(self * other.v, self * other.d, other.level)
        return GDual(self.v * other, self.d * other, self.level)

    __rmul__ = __mul__

    def _recip(self):
        iv = 1.0 / self.v
        return GDual(iv, -(self.d * iv) * iv, self.level)

    def __truediv__(self, other):
        if isinstance(other, GDual):
            return self * other._recip()
        return self * (1.0 / other)

    def __rtruediv__(self, other):
        return self._recip() * other

    def __pow__(self, n):
        if isinstance(n, GDual) and n.level >= self.level:
            return exp(log(self) * n)
        if n == 2:
            return self * self
        return self._chain(self.v ** n, n * self.v ** (n - 1))

    def __rpow__(self, base):
        return exp(self * math.log(base))

    def __abs__(self):
        return -self if real(self) < 0 else self

    def __lt__(self, other):
        return real(self) < real(other)

    def __le__(self, other):
        return real(self) <= real(other)

    def __gt__(self, other):
        return real(self) > real(other)

    def __ge__(self, other):
        return real(self) >= real(other)

    def _chain(self, fv, dfv):
        return GDual(fv, dfv * self.d, self.level)

    def sin(self):
        return self._chain(sin(self.v), cos(self.v))

    def cos(self):
        return self._chain(cos(self.v), -sin(self.v))

    def tan(self):
        t = tan(self.v)
        return self._chain(t, 1.0 + t * t)

    def exp(self):
        e = exp(self.v)
        return self._chain(e, e)

    def log(self):
        return self._chain(log(self.v), 1.0 / self.v)

    def sqrt(self):
        s = sqrt(self.v)
        return self._chain(s, 0.5 / s)

    def sinh(self):
        return self._chain(sinh(self.v), cosh(self.v))

    def cosh(self):
        return self._chain(cosh(self.v), sinh(self.v))

    def tanh(self):
        t = tanh(self.v)
        return self._chain(t, 1.0 - t * t)

    def atan(self):
        return self._chain(atan(self.v), 1.0 / (1.0 + self.v * self.v))


def _dispatch(name, mathfn):
    def fn(x):
        if isinstance(x, _NUMS):
            return mathfn(x)
        return getattr(x, name)()
    fn.__name__ = name
    return fn


sin = _dispatch("sin", math.sin)
cos = _dispatch("cos", math.cos)
tan = _dispatch("tan", math.tan)
exp = _dispatch("exp", math.exp)
log = _dispatch("log", math.log)
sqrt = _dispatch("sqrt", math.sqrt)
sinh = _dispatch("sinh", math.sinh)
cosh = _dispatch("cosh", math.cosh)
tanh = _dispatch("tanh", math.tanh)
atan = _dispatch("atan", math.atan)


def real(x):
    """Strip all dual parts, returning the underlying float."""
    while not isinstance(x, _NUMS):
        x = x.v
    return float(x)


def _is_plain(xs):
    return all(isinstance(x, _NUMS) for x in xs)


def _as_array(rows, q, p):
    out = np.empty((q, p), dtype=object)
    plain = True
    for j, col in enumerate(rows):
        for i, entry in enumerate(col):
            out[i, j] = entry
            plain = plain and isinstance(entry, _NUMS)
    if plain:
        return out.astype(float)
    return out


def jacobian(fn, x, q=None):
    """Jacobian of ``fn`` (sequence -> sequence) at the point ``x``.

    Returns a ``(q, p)`` array; float dtype when all inputs are plain
    numbers, object dtype (entries may be duals) when differentiation is
    nested inside another differentiation.
    """
    xs = list(x)
    p = len(xs)
    with _entered():
        if _is_plain(xs) and _depth() == 1:
            cols = []
            for j in range(p):
                seeded = list(xs)
                seeded[j] = Dual(xs[j], 1.0)
                out = fn(seeded)
                cols.append(
                    [o.d if isinstance(o, Dual) else 0.0 for o in out])
            return np.array(cols, dtype=float).T
        level = next(_level_counter)
        cols = []
        for j in range(p):
            seeded = list(xs)
            seeded[j] = GDual(xs[j], 1.0, level)
            out = fn(seeded)
            col = []
            for o in out:
                if isinstance(o, GDual) and o.level == level:
                    col.append(o.d)
                else:
                    col.append(0.0)
            cols.append(col)
        return _as_array(cols, len(cols[0]), p)


def directional(fn, x, u):
    """Derivative of ``fn`` at ``x`` along direction ``u`` (one pass)."""
    xs = list(x)
    us = list(u)
    with _entered():
        if _is_plain(xs) and _is_plain(us) and _depth() == 1:
            out = fn([Dual(a, b) for a, b in zip(xs, us)])
            return np.array(
                [o.d if isinstance(o, Dual) else 0.0 for o in out],
                dtype=float)
        level = next(_level_counter)
        out = fn([GDual(a, b, level) for a, b in zip(xs, us)])
        col = [o.d if isinstance(o, GDual) and o.level == level else 0.0
               for o in out]
        if _is_plain(col):
            return np.array(col, dtype=float)
        return np.array(col, dtype=object)


def second_directional(fn, x, u, v):
    """Mixed second directional derivative D^2 fn(x)[u, v] per component."""
    xs, us, vs = list(x), list(u), list(v)
    with _entered():
        if _is_plain(xs) and _is_plain(us) and _is_plain(vs) \
                and _depth() == 1:
            out = fn([Dual2(a, b, c) for a, b, c in zip(xs, us, vs)])
            return np.array(
                [o.duv if isinstance(o, Dual2) else 0.0 for o in out],
                dtype=float)
        lv = next(_level_counter)
        zs = [GDual(a, c, lv) for a, c in zip(xs, vs)]
        lu = next(_level_counter)
        ws = [GDual(z, b, lu) for z, b in zip(zs, us)]
        out = fn(ws)
        res = []
        for o in out:
            inner = o.d if isinstance(o, GDual) and o.level == lu else 0.0
            mixed = inner.d \
                if isinstance(inner, GDual) and inner.level == lv else 0.0
            res.append(mixed)
        if _is_plain(res):
            return np.array(res, dtype=float)
        return np.array(res, dtype=object)
