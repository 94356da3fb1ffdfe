"""Smooth maps between coordinate boxes with exact forward-mode derivatives.

A :class:`SmoothMap` is a plain callable body from a list of p scalars to a
list of q scalars, written so that dual numbers flow through every
operation.  Evaluation checks the domain box strictly; differentiation only
warns near the boundary.
"""

import warnings

import numpy as np

from gnk import dual
from gnk.errors import CompositionError, OutOfDomainError

__all__ = ["SmoothMap", "builtin_map", "random_polynomial_map", "box_sampler"]

_BOX_EPS = 1e-12


def _check_box(box, x, name):
    if box is None:
        return
    for i, xi in enumerate(x):
        lo, hi = box[i]
        if not (lo - _BOX_EPS <= xi <= hi + _BOX_EPS):
            raise OutOfDomainError(
                "%s: coordinate %d = %g outside [%g, %g]"
                % (name, i, xi, lo, hi))


class SmoothMap:
    """A smooth map R^p -> R^q given by a dual-number-safe body."""

    def __init__(self, dom_dim, cod_dim, body, box=None, name="map"):
        self.dom_dim = int(dom_dim)
        self.cod_dim = int(cod_dim)
        self.body = body
        self.box = None if box is None else np.asarray(box, dtype=float)
        if self.box is not None and self.box.shape != (self.dom_dim, 2):
            raise CompositionError("domain box must have shape (p, 2)")
        self.name = name

    def __repr__(self):
        return "SmoothMap(%s: R^%d -> R^%d)" % (
            self.name, self.dom_dim, self.cod_dim)

    def __call__(self, x):
        """Raw evaluation (no domain check); accepts dual scalars."""
        out = self.body(list(x))
        if all(isinstance(o, (int, float)) for o in out):
            return np.array(out, dtype=float)
        return np.array(out, dtype=object)

    def eval(self, x):
        """Checked evaluation at a plain float point."""
        x = [float(xi) for xi in x]
        if len(x) != self.dom_dim:
            raise CompositionError(
                "%s expects %d coordinates, got %d"
                % (self.name, self.dom_dim, len(x)))
        _check_box(self.box, x, self.name)
        out = np.array([float(o) for o in self.body(x)], dtype=float)
        if len(out) != self.cod_dim:
            raise CompositionError(
                "%s returned %d coordinates, expected %d"
                % (self.name, len(out), self.cod_dim))
        return out

    def _warn_box(self, x):
        if self.box is None:
            return
        for i, xi in enumerate(x):
            if not isinstance(xi, (int, float)):
                return
            lo, hi = self.box[i]
            if not (lo - _BOX_EPS <= xi <= hi + _BOX_EPS):
                warnings.warn(
                    "%s differentiated outside its domain box" % self.name,
                    stacklevel=3)
                return

    def jacobian(self, x):
        self._warn_box(x)
        return dual.jacobian(self.body, list(x), self.cod_dim)

    def directional(self, x, u):
        self._warn_box(x)
        return dual.directional(self.body, list(x), list(u))

    def second_directional(self, x, u, v):
        self._warn_box(x)
        return dual.second_directional(self.body, list(x), list(u), list(v))

    def compose(self, inner):
        """self after inner."""
        if inner.cod_dim != self.dom_dim:
            raise CompositionError(
                "cannot compose %s after %s" % (self.name, inner.name))
        outer_body, inner_body = self.body, inner.body
        return SmoothMap(
            inner.dom_dim, self.cod_dim,
            lambda x: outer_body(list(inner_body(x))),
            box=inner.box,
            name="%s.%s" % (self.name, inner.name))

    def product(self, other):
        """Product map on concatenated coordinates."""
        p1, b1 = self.dom_dim, self.body
        b2 = other.body
        box = None
        if self.box is not None and other.box is not None:
            box = np.vstack([self.box, other.box])
        return SmoothMap(
            self.dom_dim + other.dom_dim, self.cod_dim + other.cod_dim,
            lambda x: list(b1(x[:p1])) + list(b2(x[p1:])),
            box=box,
            name="%sx%s" % (self.name, other.name))


def identity_map(p, box=None):
    return SmoothMap(p, p, lambda x: list(x), box=box, name="identity")


def linear_map(matrix, box=None):
    m = np.asarray(matrix, dtype=float)
    q, p = m.shape

    def body(x):
        return [sum(m[i, j] * x[j] for j in range(p) if m[i, j] != 0.0)
                if np.any(m[i] != 0.0) else 0.0 for i in range(q)]

    return SmoothMap(p, q, body, box=box, name="linear")


def affine_map(matrix, offset, box=None):
    m = np.asarray(matrix, dtype=float)
    b = np.asarray(offset, dtype=float)
    q, p = m.shape

    def body(x):
        return [b[i] + sum(m[i, j] * x[j] for j in range(p)
                           if m[i, j] != 0.0) for i in range(q)]

    return SmoothMap(p, q, body, box=box, name="affine")


def polynomial_map(p, q, terms, box=None):
    """``terms[i]`` is a list of ``(coeff, exponents)`` monomials for
    output i, with ``exponents`` a length-p tuple of integers."""

    def body(x):
        out = []
        for tlist in terms:
            acc = 0.0
            for coeff, exps in tlist:
                mono = coeff
                for j, e in enumerate(exps):
                    for _ in range(int(e)):
                        mono = mono * x[j]
                acc = acc + mono
            out.append(acc)
        return out

    return SmoothMap(p, q, body, box=box, name="polynomial")


def trig_map(p, q, terms, box=None):
    """``terms[i]`` is a list of ``(kind, amplitude, freqs, phase)`` with
    kind 'sin' or 'cos' and ``freqs`` a length-p tuple."""

    def body(x):
        out = []
        for tlist in terms:
            acc = 0.0
            for kind, amp, freqs, phase in tlist:
                arg = phase
                for j, f in enumerate(freqs):
                    if f != 0.0:
                        arg = arg + f * x[j]
                wave = dual.sin(arg) if kind == "sin" else dual.cos(arg)
                acc = acc + amp * wave
            out.append(acc)
        return out

    return SmoothMap(p, q, body, box=box, name="trig")


_BUILTINS = {
    "identity": identity_map,
    "linear": linear_map,
    "affine": affine_map,
    "polynomial": polynomial_map,
    "trig": trig_map,
}


def builtin_map(name, *args, **kwargs):
    """Construct a built-in map by name (see ``_BUILTINS`` keys)."""
    try:
        ctor = _BUILTINS[name]
    except KeyError:
        raise CompositionError("unknown built-in map %r" % name) from None
    return ctor(*args, **kwargs)


def random_polynomial_map(p, q, degree, rng, scale=0.3, box=None):
    """Random polynomial map with coefficients shrinking with degree,
    so compositions stay tame on unit-scale boxes."""
    terms = []
    for _ in range(q):
        tlist = [(scale * rng.standard_normal(), (0,) * p)]
        for j in range(p):
            for d in range(1, degree + 1):
                exps = [0] * p
                exps[j] = d
                tlist.append(
                    (scale * rng.standard_normal() / (2.0 ** d), tuple(exps)))
        if p >= 2 and degree >= 2:
            exps = [0] * p
            exps[0] = 1
            exps[1] = 1
            tlist.append((scale * rng.standard_normal() / 4.0, tuple(exps)))
        terms.append(tlist)
    return polynomial_map(p, q, terms, box=box)


def box_sampler(box, rng, margin=0.0):
    """Uniform sample from a box, optionally shrunk by a relative margin."""
    box = np.asarray(box, dtype=float)
    lo, hi = box[:, 0], box[:, 1]
    if margin:
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo) * (1.0 - margin)
        lo, hi = mid - half, mid + half
    return lo + (hi - lo) * rng.random(len(box))
