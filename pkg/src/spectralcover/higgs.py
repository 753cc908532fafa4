"""Commuting matrix tuples (local Higgs fields) and their spectral data.

A Higgs field over a point of a ``d``-dimensional base is a tuple of ``d``
pairwise commuting ``n x n`` matrices ``Phi_1, ..., Phi_d``.  Its spectral
cover fiber is the joint spectrum: ``n`` points ``w = (w_1, ..., w_d)`` of
simultaneous eigenvalues.  This module computes that fiber together with
the polynomial invariants that describe it:

* the pencil determinant ``det(x0 I + sum_j x_j Phi_j)``,
* the characteristic polynomial of a directional combination
  ``sum_j v_j Phi_j``, its exterior traces and its power traces,
* the overdetermined system ``det(sum_j v_j (Phi_j - w_j I)) = 0 for all v``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np

from ._seeding import complex_normal, rng_for
from .errors import CommutativityError, JointSpectrumError, ShapeError
from .matkernel import as_matrix, commutator_norm, frozen, hessenberg, round_sig, schur
from .poly import UniPoly, interpolate_homogeneous, monomials

__all__ = ['CommutingReport', 'HiggsTuple', 'SpectrumPoint', 'JointSpectrum',
           'ResidualReport', 'check_commuting', 'joint_spectrum',
           'pencil_determinant', 'char_poly_direction', 'characteristic_polynomial',
           'exterior_trace', 'power_traces', 'spectral_residuals',
           'spectrum_determinant_residual', 'COMMUTE_TOL']

COMMUTE_TOL = 1e-8
LEAKAGE_TOL = 1e-8
CLUSTER_RTOL = 1e-6


@dataclass(frozen=True)
class CommutingReport:
    max_commutator: float
    passed: bool
    tol: float
    worst_pair: tuple | None = None


def _stack(components):
    try:
        mats = [as_matrix(m, f'component {j}') for j, m in enumerate(components)]
    except TypeError as exc:
        raise ShapeError('components must be a sequence of matrices') from exc
    if not mats:
        raise ShapeError('need at least one component')
    n = mats[0].shape[0]
    for j, m in enumerate(mats):
        if m.shape != (n, n):
            raise ShapeError(f'component {j} has shape {m.shape}, component 0 has {(n, n)}')
    return frozen(np.stack(mats))


def check_commuting(components, tol=COMMUTE_TOL):
    """Certify that the matrices pairwise commute.

    The figure of merit is ``||[A, B]||_F / max(1, ||A||_F ||B||_F)``
    maximized over pairs; the check passes when it is at most ``tol``.
    """
    mats = _stack(components)
    norms = [np.linalg.norm(m) for m in mats]
    worst, pair = 0.0, None
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            val = commutator_norm(mats[i], mats[j]) / max(1.0, norms[i] * norms[j])
            if val > worst or pair is None:
                worst, pair = val, (i, j)
    return CommutingReport(worst, worst <= tol, tol, pair)


class HiggsTuple:
    """``d`` commuting ``n x n`` matrices, certified at construction.

    Parameters
    ----------
    components : sequence of array_like
        The matrices ``Phi_1, ..., Phi_d``.
    tol : float
        Commutativity tolerance passed to :func:`check_commuting`.
    force : bool
        Keep the tuple even if the check fails.  Duality statements need not
        hold for such tuples; ``certificate.passed`` records the outcome.
    """

    __slots__ = ('components', 'certificate')

    def __init__(self, components, tol=COMMUTE_TOL, force=False):
        comps = _stack(components)
        report = check_commuting(comps, tol)
        if not report.passed and not force:
            raise CommutativityError(
                f'components {report.worst_pair} do not commute: normalized commutator '
                f'{report.max_commutator:.3e} > {tol:.1e}', report)
        self.components = comps
        self.certificate = report

    @property
    def n(self):
        return self.components.shape[1]

    @property
    def d(self):
        return self.components.shape[0]

    def combination(self, v):
        """``sum_j v_j Phi_j``."""
        v = np.asarray(v, dtype=complex)
        if v.shape != (self.d,):
            raise ShapeError(f'direction must have {self.d} entries, got shape {v.shape}')
        return np.tensordot(v, self.components, axes=1)

    def conjugate(self, g):
        """The gauge-transformed tuple ``g Phi_j g^-1``."""
        g = as_matrix(g, 'gauge')
        ginv = np.linalg.inv(g)
        return HiggsTuple([g @ m @ ginv for m in self.components],
                          tol=self.certificate.tol, force=True)

    def __repr__(self):
        return f'HiggsTuple(n={self.n}, d={self.d})'


@dataclass(frozen=True)
class SpectrumPoint:
    w: tuple
    multiplicity: int

    @property
    def chart_point(self):
        """Homogeneous coordinates ``[1 : w_1 : ... : w_d]``."""
        return np.concatenate([[1.0], np.asarray(self.w, dtype=complex)])


@dataclass(frozen=True)
class JointSpectrum:
    points: tuple
    residual: float
    attempts: int = 1
    unitary: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def n(self):
        return sum(p.multiplicity for p in self.points)

    def as_array(self):
        """All points repeated by multiplicity, shape ``(n, d)``."""
        rows = [p.w for p in self.points for _ in range(p.multiplicity)]
        return np.array(rows, dtype=complex)

    def max_abs(self):
        return float(max((np.max(np.abs(p.w)) for p in self.points), default=0.0))


def _cluster(diag, rtol):
    # single-linkage clustering of the rows of diag
    k = len(diag)
    cut = rtol * (1.0 + float(np.max(np.abs(diag))))
    parent = list(range(k))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for a in range(k):
        for b in range(a + 1, k):
            if np.linalg.norm(diag[a] - diag[b]) < cut:
                parent[find(a)] = find(b)
    groups = {}
    for a in range(k):
        groups.setdefault(find(a), []).append(a)
    points = []
    for members in groups.values():
        w = diag[members].mean(axis=0)
        points.append(SpectrumPoint(tuple(complex(x) for x in w), len(members)))
    points.sort(key=lambda p: tuple(k for x in p.w
                                    for k in (round_sig(x.real), round_sig(x.imag))))
    return tuple(points)


def joint_spectrum(h, seed=0, retries=5, tol=LEAKAGE_TOL, cluster_rtol=CLUSTER_RTOL):
    """Joint spectrum by simultaneous triangularization.

    A random combination ``sum_j c_j Phi_j`` is brought to Schur form and
    every component is conjugated by the same unitary.  For a commuting tuple
    all of them come out upper triangular; their diagonals, read in
    parallel, are the joint eigenvalues.  Triangularity is verified, and up
    to ``retries`` fresh combinations are tried before giving up.

    The residual is the largest strictly-lower-triangular norm over the
    conjugated components, relative to the largest component norm.
    """
    comps = h.components
    ref = max(float(np.max(np.linalg.norm(comps, axis=(1, 2)))), np.finfo(float).tiny)
    best = None
    for attempt in range(retries + 1):
        rng = rng_for(seed, 'joint_spectrum', attempt)
        c = complex_normal(rng, h.d)
        dec = schur(np.tensordot(c, comps, axes=1))
        q = dec.q
        tri = q.conj().T @ comps @ q
        leak = max(float(np.linalg.norm(np.tril(t, -1))) for t in tri) / ref
        if best is None or leak < best[0]:
            best = (leak, tri, q, attempt + 1)
        if leak <= tol:
            break
    leak, tri, q, attempts = best
    if leak > tol:
        raise JointSpectrumError(
            f'simultaneous triangularization failed: best leakage {leak:.3e} > {tol:.1e} '
            f'after {attempts} attempts', leak, attempts)
    diag = np.stack([np.diag(t) for t in tri], axis=1)
    return JointSpectrum(_cluster(diag, cluster_rtol), leak, attempts, frozen(q))


def spectrum_determinant_residual(h, spectrum, seed=0, probes=3):
    """Largest ``|det(A_v - (v.w) I)| / ||A_v||_F^n`` over points and random ``v``."""
    rng = rng_for(seed, 'spectrum_certificate')
    worst = 0.0
    n = h.n
    eye = np.eye(n)
    for _ in range(probes):
        v = complex_normal(rng, h.d)
        a = h.combination(v)
        scale = max(np.linalg.norm(a), np.finfo(float).tiny) ** n
        for p in spectrum.points:
            lam = np.dot(v, p.w)
            worst = max(worst, abs(np.linalg.det(a - lam * eye)) / scale)
    return worst


def pencil_determinant(h, seed=0):
    """The homogeneous polynomial ``F(x) = det(x0 I + sum_j x_j Phi_j)``.

    Variables are ordered ``(x0, x1, ..., xd)``; ``F`` has degree ``n``.
    """
    comps = h.components
    eye = np.eye(h.n)

    def oracle(xs):
        mats = xs[:, 0, None, None] * eye + np.tensordot(xs[:, 1:], comps, axes=1)
        return np.linalg.det(mats)

    return interpolate_homogeneous(h.d + 1, h.n, oracle, seed=seed, batch=True)


def characteristic_polynomial(a):
    """Coefficients of ``det(w I - a)`` (constant first) as a monic :class:`UniPoly`.

    Uses the Hessenberg form of ``a`` and the La Budde recurrence on its
    leading principal submatrices, so no eigenvalues are involved.
    """
    a = as_matrix(a)
    n = a.shape[0]
    _, hm = hessenberg(a)
    polys = [np.array([1.0 + 0j])]
    for k in range(n):
        p = np.zeros(k + 2, dtype=complex)
        p[1:] += polys[k]
        p[:-1] -= hm[k, k] * polys[k]
        prod = 1.0 + 0j
        for i in range(k - 1, -1, -1):
            prod *= hm[i + 1, i]
            if prod == 0:
                break
            p[:i + 1] -= hm[i, k] * prod * polys[i]
        polys.append(p)
    return UniPoly(polys[n])


def char_poly_direction(h, v):
    """``det(w I - sum_j v_j Phi_j)`` as a monic polynomial in ``w``."""
    return characteristic_polynomial(h.combination(v))


def exterior_trace(a, m):
    """Trace of ``a`` acting on the ``m``-th exterior power.

    Equals the ``m``-th elementary symmetric function of the eigenvalues,
    read off the characteristic polynomial.
    """
    a = as_matrix(a)
    n = a.shape[0]
    if not 0 <= m <= n:
        raise ValueError(f'exterior power {m} out of range 0..{n}')
    coefs = characteristic_polynomial(a).padded(n + 1)
    return complex((-1) ** m * coefs[n - m])


def power_traces(h, v, max_i):
    """``[Tr(A), Tr(A^2), ..., Tr(A^max_i)]`` for ``A = sum_j v_j Phi_j``."""
    if max_i < 1:
        raise ValueError('max_i must be at least 1')
    a = h.combination(v)
    out = []
    p = np.eye(h.n, dtype=complex)
    for _ in range(max_i):
        p = p @ a
        out.append(complex(np.trace(p)))
    return np.array(out)


@dataclass(frozen=True)
class ResidualReport:
    """Coefficients of ``v -> det(sum_j v_j (Phi_j - w_j I))``, graded-lex order."""
    w: tuple
    coefficients: np.ndarray
    monomials: tuple
    equation_count: int
    scale: float = 1.0

    @property
    def magnitudes(self):
        return np.abs(self.coefficients)

    @property
    def max_magnitude(self):
        return float(np.max(self.magnitudes))

    @property
    def scaled_max(self):
        """``max_magnitude`` divided by ``(sum_j ||Phi_j - w_j I||_F)^n``."""
        return self.max_magnitude / self.scale if self.scale > 0 else self.max_magnitude


def spectral_residuals(h, w, seed=0):
    """Evaluate the overdetermined cover equations at the fiber point ``w``.

    The point lies on the spectral cover exactly when every coefficient of
    the degree-``n`` form ``v -> det(sum_j v_j (Phi_j - w_j I))`` vanishes.
    There are ``binom(n + d - 1, n)`` such coefficients.
    """
    w = np.asarray(w, dtype=complex)
    if w.shape != (h.d,):
        raise ShapeError(f'fiber point must have {h.d} entries, got shape {w.shape}')
    shifted = h.components - w[:, None, None] * np.eye(h.n)
    scale = float(np.sum(np.linalg.norm(shifted, axis=(1, 2)))) ** h.n

    def oracle(vs):
        return np.linalg.det(np.tensordot(vs, shifted, axes=1))

    poly = interpolate_homogeneous(h.d, h.n, oracle, seed=seed, batch=True, scale=scale)
    mons = monomials(h.d, h.n)
    count = comb(h.n + h.d - 1, h.n)
    assert count == len(mons)
    return ResidualReport(tuple(complex(x) for x in w), frozen(poly.coefficient_vector()),
                          mons, count, scale)
