"""Spectral covers over a coordinate chart of the base.

A :class:`ChartFamily` is a Higgs field ``Phi(z) = sum_k Phi_k(z) dz^k``
whose matrix entries are polynomials in the chart coordinates
``z = (z^1, ..., z^d)``.  Sweeping a grid of base points gives the fibers of
the spectral cover, ``n`` sheets over each point; where sheets collide the
cover ramifies, which shows up as a vanishing discriminant of the
directional characteristic polynomial.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import product

import numpy as np
from scipy.optimize import linear_sum_assignment

from ._seeding import complex_normal, derive_seed, rng_for
from .errors import CommutativityError, ShapeError, SpectralCoverError
from .higgs import COMMUTE_TOL, HiggsTuple, char_poly_direction, check_commuting, joint_spectrum
from .matkernel import frozen
from .poly import discriminant

__all__ = ['ChartFamily', 'GridAxis', 'GridSpec', 'CoverSlice', 'RamificationReport',
           'evaluate_family', 'sweep_grid', 'detect_ramification', 'parse_grid',
           'match_sheets', 'matching_distance', 'track_sheets']

DISCRIMINANT_THRESHOLD = 1e-6
PRECHECK_POINTS = 20
AMBIGUITY_TOL = 1e-9


class ChartFamily:
    """Polynomial Higgs field over a chart.

    ``entries[j][r][c]`` maps exponent tuples (length ``d``) to complex
    coefficients and gives entry ``(r, c)`` of the component ``Phi_j``.
    Unless ``precheck=False`` the family is checked for commutativity at
    20 seeded random base points.
    """

    def __init__(self, n, d, entries, label='', precheck=True, tol=COMMUTE_TOL, seed=0):
        if n < 1 or d < 1:
            raise ShapeError('need n >= 1 and d >= 1')
        if len(entries) != d:
            raise ShapeError(f'expected {d} components, got {len(entries)}')
        comp, rows, cols, exps, coefs = [], [], [], [], []
        for j, matrix in enumerate(entries):
            if len(matrix) != n or any(len(row) != n for row in matrix):
                raise ShapeError(f'component {j} is not {n}x{n}')
            for r, c in product(range(n), range(n)):
                for e, coef in dict(matrix[r][c]).items():
                    e = tuple(int(k) for k in e)
                    if len(e) != d or min(e) < 0:
                        raise ShapeError(f'entry ({j}, {r}, {c}): bad exponent {e} for d = {d}')
                    comp.append(j)
                    rows.append(r)
                    cols.append(c)
                    exps.append(e)
                    coefs.append(complex(coef))
        self.n, self.d, self.label = n, d, label
        self._comp = np.array(comp, dtype=int)
        self._rows = np.array(rows, dtype=int)
        self._cols = np.array(cols, dtype=int)
        self._exps = frozen(np.array(exps, dtype=int).reshape(len(exps), d))
        self._coefs = frozen(np.array(coefs, dtype=complex))
        if not np.all(np.isfinite(self._coefs)):
            raise ValueError('non-finite family coefficient')
        if precheck:
            rng = rng_for(seed, 'family_precheck')
            for _ in range(PRECHECK_POINTS):
                z = complex_normal(rng, d)
                report = check_commuting(self.matrices(z), tol)
                if not report.passed:
                    raise CommutativityError(
                        f'family does not commute at z = {np.round(z, 6)}: normalized '
                        f'commutator {report.max_commutator:.3e}', report)

    @classmethod
    def constant(cls, matrices, label='', **kwargs):
        mats = np.asarray(matrices, dtype=complex)
        d, n = mats.shape[0], mats.shape[1]
        zero = (0,) * d
        entries = [[[{zero: mats[j, r, c]} if mats[j, r, c] != 0 else {}
                     for c in range(n)] for r in range(n)] for j in range(d)]
        return cls(n, d, entries, label=label, **kwargs)

    def matrices(self, z):
        """The component matrices at ``z`` as a ``(d, n, n)`` array."""
        z = np.asarray(z, dtype=complex).reshape(-1)
        if z.shape != (self.d,):
            raise ShapeError(f'base point must have {self.d} coordinates, got {z.shape[0]}')
        vals = self._coefs * np.prod(z[None, :] ** self._exps, axis=1)
        out = np.zeros((self.d, self.n, self.n), dtype=complex)
        np.add.at(out, (self._comp, self._rows, self._cols), vals)
        return out

    def __repr__(self):
        return f'ChartFamily(n={self.n}, d={self.d}, label={self.label!r})'


def evaluate_family(fam, z, tol=COMMUTE_TOL, force=False):
    """The certified :class:`HiggsTuple` of ``fam`` at base point ``z``."""
    return HiggsTuple(fam.matrices(z), tol=tol, force=force)


@dataclass(frozen=True)
class GridAxis:
    """``points`` samples of ``center + [-half_width, half_width]``.

    A complex axis samples the square ``center + s + i t`` with ``s`` and
    ``t`` both on that interval, i.e. ``points**2`` values.
    """
    center: complex
    half_width: float
    points: int
    complex_axis: bool = False
    explicit: tuple = ()

    @classmethod
    def from_values(cls, values):
        """Axis sampled at the given values instead of an interval."""
        values = tuple(complex(v) for v in values)
        return cls(0j, 0.0, len(values), False, values)

    def values(self):
        if self.explicit:
            return np.array(self.explicit, dtype=complex)
        t = np.linspace(-self.half_width, self.half_width, self.points)
        if self.complex_axis:
            return (self.center + t[None, :] + 1j * t[:, None]).ravel()
        return self.center + t.astype(complex)

    @property
    def spacing(self):
        if self.explicit:
            return float(np.min(np.abs(np.diff(self.values())))) if self.points > 1 else 0.0
        return 2 * self.half_width / (self.points - 1) if self.points > 1 else 0.0


@dataclass(frozen=True)
class GridSpec:
    axes: tuple

    def __post_init__(self):
        if not self.axes:
            raise ValueError('grid needs at least one axis')
        for ax in self.axes:
            if ax.points < 1 or ax.half_width < 0:
                raise ValueError(f'bad grid axis {ax}')
        if any(ax.complex_axis for ax in self.axes) and len(self.axes) > 2:
            raise ValueError('complex axes are limited to d <= 2')

    @property
    def d(self):
        return len(self.axes)

    def points(self):
        """Grid points, shape ``(N, d)``, last axis varying fastest."""
        grids = np.meshgrid(*[ax.values() for ax in self.axes], indexing='ij')
        return np.stack([g.ravel() for g in grids], axis=1)

    @property
    def shape(self):
        return tuple(len(ax.values()) for ax in self.axes)


def parse_grid(text):
    """Parse ``"center,half_width,points[,c]; ..."``, one group per axis.

    ``center`` is any Python complex literal; a trailing ``c`` marks a
    complex (two-parameter) axis.  An axis may instead list its values
    explicitly as ``[v1|v2|...]``.
    """
    axes = []
    for chunk in text.split(';'):
        if chunk.strip().startswith('['):
            body = chunk.strip()
            if not body.endswith(']'):
                raise ValueError(f'bad explicit axis {body!r}: missing "]"')
            try:
                vals = [complex(v.replace(' ', '')) for v in body[1:-1].split('|') if v.strip()]
            except ValueError as exc:
                raise ValueError(f'bad explicit axis {body!r}: {exc}') from exc
            if not vals:
                raise ValueError(f'explicit axis {body!r} has no values')
            axes.append(GridAxis.from_values(vals))
            continue
        parts = [p.strip() for p in chunk.split(',') if p.strip()]
        if len(parts) not in (3, 4) or (len(parts) == 4 and parts[3] != 'c'):
            raise ValueError(f'bad axis spec {chunk.strip()!r}: expected center,half_width,points[,c]')
        try:
            axis = GridAxis(complex(parts[0].replace(' ', '')), float(parts[1]), int(parts[2]),
                            len(parts) == 4)
        except ValueError as exc:
            raise ValueError(f'bad axis spec {chunk.strip()!r}: {exc}') from exc
        axes.append(axis)
    return GridSpec(tuple(axes))


@dataclass(frozen=True)
class CoverSlice:
    """One fiber of the cover: the joint spectrum over base point ``z``."""
    index: int
    z: tuple
    spectrum: object
    residual: float
    error: str | None = None

    @property
    def ok(self):
        return self.error is None


def _slice(fam, idx, z, seed, tol, force):
    try:
        h = evaluate_family(fam, z, tol=tol, force=force)
        spec = joint_spectrum(h, seed=derive_seed(seed, 'sweep', idx))
    except SpectralCoverError as exc:
        return CoverSlice(idx, tuple(complex(x) for x in z), None, float('nan'),
                          f'{type(exc).__name__}: {exc}')
    return CoverSlice(idx, tuple(complex(x) for x in z), spec, spec.residual)


def _grid_points(fam, grid):
    if grid.d != fam.d:
        raise ShapeError(f'grid has {grid.d} axes, family base dimension is {fam.d}')
    return grid.points()


def sweep_grid(fam, grid, seed=0, tol=COMMUTE_TOL, force=False, max_workers=None):
    """Joint spectra over every grid point.

    Failures at individual points (non-commuting values, uncertifiable
    triangularization) are recorded in the slice rather than raised.  Each
    point draws randomness from its own seed, so any ``max_workers`` gives
    identical output.
    """
    pts = _grid_points(fam, grid)
    if max_workers and max_workers > 1:
        with ThreadPoolExecutor(max_workers) as pool:
            return list(pool.map(lambda i: _slice(fam, i, pts[i], seed, tol, force),
                                 range(len(pts))))
    return [_slice(fam, i, z, seed, tol, force) for i, z in enumerate(pts)]


@dataclass(frozen=True)
class RamificationReport:
    """Grid points where the scale-free discriminant drops below ``threshold``."""
    probes: tuple
    threshold: float
    values: tuple
    flagged: tuple
    failures: tuple

    @property
    def flagged_indices(self):
        return tuple(i for i, _, _ in self.flagged)


def _normalized_discriminant(h, v):
    a = h.combination(v)
    scale = np.linalg.norm(a)
    if scale == 0:
        return 0.0
    q = char_poly_direction(h, v)
    n = h.n
    return abs(discriminant(q)) / scale ** (n * (n - 1))


def detect_ramification(fam, grid, probe_count=3, seed=0, threshold=DISCRIMINANT_THRESHOLD,
                        tol=COMMUTE_TOL, force=False):
    """Flag candidate branch points on a grid.

    At each point the characteristic polynomial of ``sum_j v_j Phi_j(z)``
    is formed for ``probe_count`` random unit directions ``v``; its
    discriminant, divided by ``||sum_j v_j Phi_j||_F^(n(n-1))`` so that it
    is invariant under ``Phi -> c Phi``, is minimized over the probes.
    Points where this falls to ``threshold`` or below are flagged.  Rank-one
    families never ramify.
    """
    if probe_count < 1:
        raise ValueError('probe_count must be at least 1')
    rng = rng_for(seed, 'ramification_probes')
    probes = []
    for _ in range(probe_count):
        v = complex_normal(rng, fam.d)
        probes.append(v / np.linalg.norm(v))
    pts = _grid_points(fam, grid)
    values, flagged, failures = [], [], []
    for i, z in enumerate(pts):
        zt = tuple(complex(x) for x in z)
        try:
            h = evaluate_family(fam, z, tol=tol, force=force)
        except SpectralCoverError as exc:
            values.append(float('nan'))
            failures.append((i, zt, f'{type(exc).__name__}: {exc}'))
            continue
        if h.n < 2:
            values.append(float('inf'))
            continue
        val = min(_normalized_discriminant(h, v) for v in probes)
        values.append(val)
        if val <= threshold:
            flagged.append((i, zt, val))
    return RamificationReport(tuple(tuple(complex(x) for x in v) for v in probes), threshold,
                              tuple(values), tuple(flagged), tuple(failures))


def _distances(a, b):
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    return np.linalg.norm(a[:, None, :] - b[None, :, :], axis=-1)


def match_sheets(a, b, ambiguity=AMBIGUITY_TOL):
    """Permutation ``perm`` pairing sheet ``i`` of ``a`` with sheet ``perm[i]`` of ``b``.

    Greedy closest-pair assignment; when two candidate distances tie
    within ``ambiguity`` the optimal (minimum total distance) assignment is
    used instead.
    """
    dist = _distances(a, b)
    k = len(dist)
    order = np.argsort(dist, axis=None, kind='stable')
    flat = dist.ravel()[order]
    if k > 1 and np.any(np.diff(flat) <= ambiguity):
        rows, cols = linear_sum_assignment(dist)
        perm = np.empty(k, dtype=int)
        perm[rows] = cols
        return perm
    perm = -np.ones(k, dtype=int)
    used = np.zeros(k, dtype=bool)
    for idx in order:
        i, j = divmod(int(idx), k)
        if perm[i] < 0 and not used[j]:
            perm[i] = j
            used[j] = True
    return perm


def matching_distance(a, b):
    """Largest pair distance under the optimal matching of two point multisets."""
    dist = _distances(a, b)
    if dist.shape[0] != dist.shape[1]:
        raise ShapeError(f'multisets have different sizes {dist.shape}')
    rows, cols = linear_sum_assignment(dist)
    return float(dist[rows, cols].max()) if len(rows) else 0.0


def track_sheets(slices):
    """Sheets along a sequence of slices, consistently labelled.

    Returns an array of shape ``(len(slices), n, d)``; failed slices are
    filled with ``nan`` and restart the labelling.
    """
    out = None
    prev = None
    for k, s in enumerate(slices):
        if not s.ok:
            if out is not None:
                out[k] = np.nan
            prev = None
            continue
        pts = s.spectrum.as_array()
        if out is None:
            out = np.full((len(slices),) + pts.shape, np.nan, dtype=complex)
        if prev is not None:
            perm = match_sheets(prev, pts)
            pts = pts[perm]
        out[k] = pts
        prev = pts
    return out
