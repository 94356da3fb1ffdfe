"""Small dense linear algebra that tolerates dual-number entries.

numpy's own ``det``/``inv`` only accept float matrices, so anything that
must run under forward-mode differentiation goes through these helpers.
They pivot on the real part of each entry, which keeps elimination stable
while the dual parts ride along.
"""

import numpy as np

from gnk.dual import real
from gnk.errors import RankDropError

__all__ = ["mdot", "as_obj", "to_float", "gdet", "ginv", "gsolve",
           "kernel_basis"]

_PIVOT_TOL = 1e-12


def as_obj(a):
    return np.array(a, dtype=object)


def to_float(a):
    """Strip dual parts elementwise, returning a float array."""
    return np.vectorize(real, otypes=[float])(np.asarray(a, dtype=object))


def mdot(a, b):
    """Matrix product that works for float and object dtypes alike."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.dtype == object or b.dtype == object:
        return np.dot(a.astype(object), b.astype(object))
    return np.dot(a, b)


def _rows(a):
    a = np.asarray(a)
    return [list(row) for row in a]


def _pivot_row(rows, col, start):
    best, best_mag = start, abs(real(rows[start][col]))
    for i in range(start + 1, len(rows)):
        mag = abs(real(rows[i][col]))
        if mag > best_mag:
            best, best_mag = i, mag
    return best, best_mag


def gdet(a):
    """Determinant by Gaussian elimination with real-part pivoting."""
    rows = _rows(a)
    n = len(rows)
    det = 1.0
    for c in range(n):
        p, mag = _pivot_row(rows, c, c)
        if mag == 0.0:
            return 0.0 * rows[0][0]
        if p != c:
            rows[c], rows[p] = rows[p], rows[c]
            det = -det
        piv = rows[c][c]
        det = det * piv
        for i in range(c + 1, n):
            f = rows[i][c] / piv
            for j in range(c + 1, n):
                rows[i][j] = rows[i][j] - f * rows[c][j]
    return det


def ginv(a):
    """Inverse by Gauss-Jordan elimination; raises on near-singular input."""
    rows = _rows(a)
    n = len(rows)
    scale = max(abs(real(e)) for r in rows for e in r) or 1.0
    aug = [r + [1.0 if i == j else 0.0 for j in range(n)]
           for i, r in enumerate(rows)]
    for c in range(n):
        p, mag = _pivot_row(aug, c, c)
        if mag <= _PIVOT_TOL * scale:
            raise RankDropError("matrix is singular to working precision")
        if p != c:
            aug[c], aug[p] = aug[p], aug[c]
        piv = aug[c][c]
        aug[c] = [e / piv for e in aug[c]]
        for i in range(n):
            if i == c:
                continue
            f = aug[i][c]
            if isinstance(f, float) and f == 0.0:
                continue
            aug[i] = [ei - f * ej for ei, ej in zip(aug[i], aug[c])]
    out = np.empty((n, n), dtype=object)
    for i in range(n):
        out[i, :] = aug[i][n:]
    if all(isinstance(e, float) for r in aug for e in r[n:]):
        return out.astype(float)
    return out


def gsolve(a, b):
    """Solve ``a @ x = b`` for a square ``a`` (b may be a vector or matrix)."""
    b = np.asarray(b)
    vec = b.ndim == 1
    x = mdot(ginv(a), b.reshape(len(b), -1))
    return x[:, 0] if vec else x


def kernel_basis(a, tol=1e-9):
    """Orthonormal basis of the kernel of a float matrix.

    Deterministic: reduced row echelon form picks pivot columns in
    coordinate order, the resulting free-variable basis vectors are then
    Gram-Schmidt orthonormalized in the same order.
    """
    a = np.asarray(a, dtype=float).copy()
    m, n = a.shape
    scale = np.max(np.abs(a)) or 1.0
    pivots = []
    r = 0
    for c in range(n):
        if r >= m:
            break
        p = r + int(np.argmax(np.abs(a[r:, c])))
        if abs(a[p, c]) <= tol * scale:
            continue
        a[[r, p]] = a[[p, r]]
        a[r] = a[r] / a[r, c]
        for i in range(m):
            if i != r and a[i, c] != 0.0:
                a[i] = a[i] - a[i, c] * a[r]
        pivots.append(c)
        r += 1
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for c in free:
        v = np.zeros(n)
        v[c] = 1.0
        for i, pc in enumerate(pivots):
            v[pc] = -a[i, c]
        basis.append(v)
    # Gram-Schmidt in coordinate order for determinism
    ortho = []
    for v in basis:
        w = v.copy()
        for u in ortho:
            w -= np.dot(w, u) * u
        nrm = np.linalg.norm(w)
        if nrm <= tol:
            raise RankDropError("kernel basis degenerated during "
                                "orthonormalization")
        ortho.append(w / nrm)
    return np.array(ortho).T if ortho else np.zeros((n, 0))
