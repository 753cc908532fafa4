"""Dense complex matrix kernel.

Matrices are plain ``complex128`` numpy arrays.  Values handed out by this
module are read-only copies, so they can be shared freely.

The eigen-solver is the textbook one: Householder reduction to upper
Hessenberg form followed by implicitly shifted complex QR with Givens
rotations and deflation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, ShapeError

__all__ = ['SchurDecomposition', 'as_matrix', 'frozen', 'commutator_norm',
           'hessenberg', 'schur', 'eigenvalues', 'canonical_order',
           'round_sig']

_EPS = np.finfo(float).eps


def frozen(a):
    """Return ``a`` as a read-only array (no copy if it already is one)."""
    a = np.asarray(a)
    if a.flags.writeable:
        a = a.copy()
        a.flags.writeable = False
    return a


def as_matrix(a, name='matrix', square=True):
    """Validate and convert ``a`` to a read-only complex matrix."""
    m = np.array(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] == 0 or m.shape[1] == 0:
        raise ShapeError(f'{name} must be a non-empty 2-D array, got shape {m.shape}')
    if square and m.shape[0] != m.shape[1]:
        raise ShapeError(f'{name} must be square, got shape {m.shape}')
    if not np.all(np.isfinite(m)):
        raise ValueError(f'{name} has non-finite entries')
    m.flags.writeable = False
    return m


def commutator_norm(a, b):
    """Frobenius norm of ``ab - ba``."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if (a.ndim != 2 or a.shape[0] != a.shape[1] or b.shape != a.shape):
        raise ShapeError(f'commutator needs square matrices of equal size, '
                         f'got {a.shape} and {b.shape}')
    if a is b:
        return 0.0
    return float(np.linalg.norm(a @ b - b @ a))


@dataclass(frozen=True)
class SchurDecomposition:
    """``a = q @ t @ q.conj().T`` with ``q`` unitary, ``t`` upper triangular."""
    q: np.ndarray
    t: np.ndarray
    iterations: int = 0

    @property
    def eigenvalues(self):
        return np.diag(self.t).copy()

    def reconstruction_error(self, a):
        a = np.asarray(a, dtype=complex)
        return float(np.linalg.norm(self.q @ self.t @ self.q.conj().T - a))

    def unitarity_error(self):
        n = self.q.shape[0]
        return float(np.linalg.norm(self.q @ self.q.conj().T - np.eye(n)))


def hessenberg(a):
    """Householder reduction ``a = q h q^*`` with ``h`` upper Hessenberg.

    Returns ``(q, h)`` as new writable arrays.
    """
    h = np.array(a, dtype=complex)
    n = h.shape[0]
    q = np.eye(n, dtype=complex)
    for k in range(n - 2):
        x = h[k + 1:, k]
        xnorm = np.linalg.norm(x)
        if xnorm == 0.0 or np.linalg.norm(x[1:]) <= _EPS * xnorm:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        v = x.copy()
        v[0] += phase * xnorm
        v /= np.linalg.norm(v)
        h[k + 1:, :] -= 2.0 * np.outer(v, v.conj() @ h[k + 1:, :])
        h[:, k + 1:] -= 2.0 * np.outer(h[:, k + 1:] @ v, v.conj())
        q[:, k + 1:] -= 2.0 * np.outer(q[:, k + 1:] @ v, v.conj())
        h[k + 2:, k] = 0.0
    return q, h


def _givens(x, y):
    # (c, s) with [[c, s], [-conj(s), c]] @ [x, y] = [r, 0], c real
    ax = abs(x)
    ay = abs(y)
    if ay == 0.0:
        return 1.0, 0j
    if ax == 0.0:
        return 0.0, np.conj(y) / ay
    r = np.hypot(ax, ay)
    return ax / r, (x / ax) * np.conj(y) / r


def _wilkinson_shift(a, b, c, d):
    # eigenvalue of [[a, b], [c, d]] closest to d
    half = 0.5 * (a - d)
    root = np.sqrt(half * half + b * c)
    m1 = d + half + root
    m2 = d + half - root
    return m1 if abs(m1 - d) < abs(m2 - d) else m2


def schur(a, tol=1e-15, max_iter=None):
    """Complex Schur decomposition by shifted QR iteration.

    Parameters
    ----------
    a : array_like, shape (n, n)
        Square complex matrix.
    tol : float
        Subdiagonal entries with magnitude below ``tol * ||a||_F`` are
        deflated (set to zero).
    max_iter : int, optional
        Total QR sweeps allowed; defaults to ``30 * n``.

    Returns
    -------
    SchurDecomposition

    Raises
    ------
    ConvergenceError
        If the iteration budget runs out before the matrix is triangular.
    """
    a = as_matrix(a)
    n = a.shape[0]
    if max_iter is None:
        max_iter = 30 * max(n, 1)
    if max_iter <= 0:
        raise ValueError('max_iter must be positive')
    scale = np.linalg.norm(a)
    if n == 1 or scale == 0.0:
        return SchurDecomposition(frozen(np.eye(n, dtype=complex)), frozen(a.copy()))

    q, h = hessenberg(a)
    floor = tol * scale
    total = 0
    its = 0
    hi = n - 1
    while hi > 0:
        lo = 0
        for k in range(hi, 0, -1):
            sub = abs(h[k, k - 1])
            if sub <= floor or sub <= _EPS * (abs(h[k, k]) + abs(h[k - 1, k - 1])):
                h[k, k - 1] = 0.0
                lo = k
                break
        if lo == hi:
            hi -= 1
            its = 0
            continue
        if total >= max_iter:
            resid = float(np.max(np.abs(np.diag(h, -1)))) / scale
            raise ConvergenceError(
                f'QR iteration did not converge after {total} sweeps '
                f'(relative subdiagonal residual {resid:.3e})', total, resid)

        # exceptional shifts break cycles, e.g. on permutation matrices
        if its and its % 20 == 10:
            mu = h[lo, lo] + 0.75 * abs(h[lo + 1, lo].real)
        elif its and its % 20 == 0:
            mu = h[hi, hi] + 0.75 * abs(h[hi, hi - 1].real)
        else:
            mu = _wilkinson_shift(h[hi - 1, hi - 1], h[hi - 1, hi],
                                  h[hi, hi - 1], h[hi, hi])

        # one implicit single-shift sweep over the active window [lo, hi]
        x = h[lo, lo] - mu
        y = h[lo + 1, lo]
        for k in range(lo, hi):
            if k > lo:
                x = h[k, k - 1]
                y = h[k + 1, k - 1]
            c, s = _givens(x, y)
            g = np.array([[c, s], [-np.conj(s), c]])
            col0 = k - 1 if k > lo else lo
            h[k:k + 2, col0:] = g @ h[k:k + 2, col0:]
            row1 = min(k + 3, hi + 1)
            gh = g.conj().T
            h[:row1, k:k + 2] = h[:row1, k:k + 2] @ gh
            q[:, k:k + 2] = q[:, k:k + 2] @ gh
            if k > lo:
                h[k + 1, k - 1] = 0.0
        its += 1
        total += 1

    t = np.triu(h)
    return SchurDecomposition(frozen(q), frozen(t), total)


def round_sig(x, digits=12):
    """Round a float to ``digits`` significant digits (``-0.0`` becomes ``0.0``)."""
    if x == 0.0 or not np.isfinite(x):
        return 0.0 if x == 0.0 else x
    return float('%.*e' % (digits - 1, x)) + 0.0


def canonical_order(values, digits=12):
    """Sort complex values lexicographically by rounded ``(re, im)``."""
    values = np.asarray(values, dtype=complex).ravel()
    keys = [(round_sig(v.real, digits), round_sig(v.imag, digits)) for v in values]
    order = sorted(range(len(values)), key=keys.__getitem__)
    return values[order]


def eigenvalues(a, tol=1e-15, max_iter=None):
    """Eigenvalues of ``a`` with multiplicity, in canonical order."""
    return canonical_order(np.diag(schur(a, tol, max_iter).t))
