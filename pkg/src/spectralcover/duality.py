"""Projective duality and the dual description of spectral covers.

Points of the fiber ``P^d`` carry homogeneous coordinates ``(x0, ..., xd)``;
points of the dual fiber carry ``(y0, ..., yd)`` and the pairing is the
bilinear form ``sum_i x_i y_i``.  A hyperplane ``sum_i a_i x_i = 0`` is dual
to the point ``[a_0 : ... : a_d]`` and a smooth hypersurface point is sent
to the dual of its tangent hyperplane, i.e. to its gradient (Gauss map).

For a commuting tuple the pencil hypersurface
``det(x0 I + sum_j x_j Phi_j) = 0`` splits into the hyperplanes
``x0 + sum_j w_j x_j = 0`` over the joint spectrum, so its Gauss image is
the finite set ``[1 : w]``, which is the spectral cover fiber placed in the
chart ``y0 = 1``.  :func:`verify_dual_cover` checks this numerically.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import ceil

import numpy as np

from ._seeding import complex_normal, derive_seed, rng_for
from .errors import NotOnHypersurfaceError, ShapeError, SingularPointError
from .higgs import HiggsTuple, char_poly_direction, joint_spectrum, pencil_determinant
from .matkernel import as_matrix
from .poly import (MultiPoly, ProjectivePoint, UniPoly, evaluate, gradient,
                   interpolate_homogeneous, restrict_to_line, uni_roots)

__all__ = ['Hyperplane', 'DualityReport', 'HypersurfaceSample', 'HitchinReport',
           'dual_point', 'incidence', 'chart_distance', 'gauss_map',
           'sample_hypersurface', 'linear_factorization', 'verify_dual_cover',
           'hitchin_check']

ON_SURFACE_TOL = 1e-8
SMOOTH_TOL = 1e-8
MATCH_TOL = 1e-6
CHART_FLOOR = 1e-6
ROOT_CLUSTER_RTOL = 1e-6


class Hyperplane:
    """The hyperplane ``sum_i alpha_i x_i = 0``, coefficients canonically scaled."""

    __slots__ = ('alpha',)

    def __init__(self, alpha):
        self.alpha = ProjectivePoint(alpha).coords

    @property
    def num_vars(self):
        return len(self.alpha)

    def __eq__(self, other):
        if not isinstance(other, Hyperplane):
            return NotImplemented
        return np.array_equal(self.alpha, other.alpha)

    def __hash__(self):
        return hash(self.alpha.tobytes())

    def __repr__(self):
        return 'Hyperplane(' + ', '.join(f'{z:.6g}' for z in self.alpha) + ')'


def dual_point(hp):
    """The point of the dual space with coordinates ``alpha``."""
    return ProjectivePoint(hp.alpha)


def _coords(pt):
    return pt.coords if isinstance(pt, ProjectivePoint) else np.asarray(pt, dtype=complex)


def incidence(hp, pt, tol=1e-10):
    """True iff ``|sum_i alpha_i y_i| <= tol * ||alpha|| * ||y||``."""
    a = hp.alpha if isinstance(hp, Hyperplane) else np.asarray(hp, dtype=complex)
    y = _coords(pt)
    if a.shape != y.shape:
        raise ShapeError(f'hyperplane has {a.shape[0]} coefficients, point has {y.shape[0]} coordinates')
    return bool(abs(np.dot(a, y)) <= tol * np.linalg.norm(a) * np.linalg.norm(y))


def chart_distance(p, q, floor=CHART_FLOOR):
    """Distance between projective points used for matching.

    When both points are in the chart ``y0 != 0`` (``|y0| >= floor * ||y||``)
    this is the Euclidean distance of the affine coordinates
    ``(y1/y0, ..., yd/y0)``.  Otherwise it falls back to
    ``1 - |<u, v>| / (||u|| ||v||)``, which needs no chart.
    """
    u, v = _coords(p), _coords(q)
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if abs(u[0]) >= floor * nu and abs(v[0]) >= floor * nv:
        return float(np.linalg.norm(u[1:] / u[0] - v[1:] / v[0]))
    return float(max(0.0, 1.0 - abs(np.vdot(u, v)) / (nu * nv)))


def _smoothness_floor(f, x, smooth_tol):
    return smooth_tol * f.coefficient_scale() * np.linalg.norm(x) ** (f.degree - 1)


def gauss_map(f, xi, on_tol=ON_SURFACE_TOL, smooth_tol=SMOOTH_TOL, grad=None):
    """Send a smooth point of ``{f = 0}`` to the dual of its tangent hyperplane.

    Parameters
    ----------
    f : MultiPoly
    xi : ProjectivePoint or array_like
    on_tol : float
        ``|f(xi)|`` must not exceed ``on_tol * scale(f) * ||xi||^deg``.
    smooth_tol : float
        The gradient norm must be at least
        ``smooth_tol * scale(f) * ||xi||^(deg - 1)``, ``scale(f)`` being the
        largest coefficient magnitude.
    grad : list of MultiPoly, optional
        Precomputed ``gradient(f)``.

    Raises
    ------
    NotOnHypersurfaceError, SingularPointError
    """
    x = _coords(xi)
    if x.shape != (f.num_vars,):
        raise ShapeError(f'point has {x.shape} coordinates, polynomial has {f.num_vars} variables')
    scale = f.coefficient_scale()
    xn = np.linalg.norm(x)
    value = abs(evaluate(f, x))
    if value > on_tol * scale * xn ** f.degree:
        raise NotOnHypersurfaceError(
            f'|f(x)| = {value:.3e} exceeds {on_tol:.1e} relative: point is not on the hypersurface')
    grad = gradient(f) if grad is None else grad
    g = np.array([evaluate(gi, x) for gi in grad])
    gnorm = np.linalg.norm(g)
    if gnorm < _smoothness_floor(f, x, smooth_tol):
        raise SingularPointError(
            f'gradient norm {gnorm:.3e} below smoothness floor: singular point of the hypersurface')
    return ProjectivePoint(g)


@dataclass(frozen=True)
class HypersurfaceSample:
    """Smooth points found on a hypersurface by random line sections."""
    points: tuple
    requested: int
    lines_used: int
    singular_rejections: int
    gauss_images: tuple = field(default=(), repr=False)

    @property
    def partial(self):
        return len(self.points) < self.requested

    @property
    def everywhere_singular(self):
        """No smooth point found although candidate points were seen."""
        return not self.points and self.singular_rejections > 0


def _line_points(f, rng, num_vars):
    base = complex_normal(rng, num_vars)
    direction = complex_normal(rng, num_vars) - base
    q = restrict_to_line(f, base, direction)
    if q.is_zero or q.degree < 1:
        return np.empty((0, num_vars), dtype=complex), 0
    roots = uni_roots(q)
    # a repeated root on a random line means a singular or non-reduced
    # point; its computed location is only good to sqrt(eps)
    keep = np.ones(len(roots), dtype=bool)
    for i in range(len(roots)):
        for j in range(len(roots)):
            if i != j and abs(roots[i] - roots[j]) <= ROOT_CLUSTER_RTOL * (1 + abs(roots[i])):
                keep[i] = False
    pts = base[None, :] + roots[keep, None] * direction[None, :]
    return pts, int(np.count_nonzero(~keep))


def _polish(f, grad, pts, steps=3):
    # Gauss-Newton projection onto {f = 0}; line roots can be ill-conditioned
    # when the intersection points crowd together along the line
    grads = np.stack([evaluate(g, pts) for g in grad], axis=1)
    for _ in range(steps):
        g2 = np.sum(np.abs(grads) ** 2, axis=1)
        ok = g2 > 0
        step = np.zeros(len(pts), dtype=complex)
        step[ok] = evaluate(f, pts[ok]) / g2[ok]
        pts = pts - step[:, None] * grads.conj()
        grads = np.stack([evaluate(g, pts) for g in grad], axis=1)
    return pts, grads


def sample_hypersurface(f, count, seed=0, smooth_tol=SMOOTH_TOL, max_lines=None,
                        on_tol=ON_SURFACE_TOL):
    """Sample up to ``count`` smooth points of ``{f = 0}``.

    Each random line (through two complex Gaussian points, stream keyed by
    the line index) is intersected with the hypersurface and the
    intersection points are polished by a few Newton projections onto
    ``{f = 0}``.  Points that are repeated roots along the line, stay off
    the surface, or fail the gradient threshold are discarded.  If the line
    budget runs out first the result is partial (``partial`` is set); a
    hypersurface without smooth points gives an empty, ``everywhere_singular``
    sample.
    """
    if f.is_zero or f.degree < 1:
        raise ValueError('need a nonzero polynomial of degree >= 1')
    if count < 0:
        raise ValueError('count must be nonnegative')
    if max_lines is None:
        max_lines = 2 * ceil(count / f.degree) + 20
    grad = gradient(f)
    scale = f.coefficient_scale()
    points, images = [], []
    rejected = 0
    lines = 0
    while len(points) < count and lines < max_lines:
        rng = rng_for(seed, 'sample_line', lines)
        lines += 1
        pts, repeated = _line_points(f, rng, f.num_vars)
        rejected += repeated
        if not len(pts):
            continue
        pts, grads = _polish(f, grad, pts)
        gnorm = np.linalg.norm(grads, axis=1)
        xnorm = np.linalg.norm(pts, axis=1)
        on = np.abs(evaluate(f, pts)) <= on_tol * scale * xnorm ** f.degree
        smooth = on & (gnorm >= smooth_tol * scale * xnorm ** (f.degree - 1))
        rejected += int(np.count_nonzero(~smooth))
        for x, g in zip(pts[smooth], grads[smooth]):
            if len(points) == count:
                break
            points.append(ProjectivePoint(x))
            images.append(ProjectivePoint(g))
    return HypersurfaceSample(tuple(points), count, lines, rejected, tuple(images))


def linear_factorization(spectrum):
    """Hyperplanes ``x0 + sum_j w_j x_j = 0`` of a joint spectrum, with multiplicities.

    Returns ``(hyperplanes, product)`` where ``product`` is the polynomial
    ``prod_a (x0 + w^a . x)^{m_a}``.
    """
    planes = []
    d = len(spectrum.points[0].w)
    product = MultiPoly.constant(d + 1)
    for p in spectrum.points:
        alpha = p.chart_point
        planes.append((Hyperplane(alpha), p.multiplicity))
        for _ in range(p.multiplicity):
            product = product * MultiPoly.linear(alpha)
    return planes, product


@dataclass(frozen=True)
class DualityReport:
    """Outcome of matching the Gauss image of the pencil hypersurface to the spectrum."""
    samples_used: int
    matched: int
    max_match_distance: float
    spectrum_hit_counts: tuple
    unmatched_samples: tuple
    spectrum: object
    samples_requested: int
    match_tol: float
    sampling_partial: bool
    everywhere_singular: bool
    pencil: MultiPoly = field(repr=False)

    @property
    def all_matched(self):
        return self.matched == self.samples_used

    @property
    def simple_points_hit(self):
        return all(c > 0 for c, p in zip(self.spectrum_hit_counts, self.spectrum.points)
                   if p.multiplicity == 1)

    @property
    def success(self):
        return self.all_matched and self.simple_points_hit

    @property
    def verdict(self):
        """``'failed'``, ``'flagged'`` (sampling fell short) or ``'passed'``."""
        if not self.success:
            return 'failed'
        if self.sampling_partial:
            return 'flagged'
        return 'passed'


def verify_dual_cover(h, samples=200, seed=0, match_tol=MATCH_TOL, smooth_tol=SMOOTH_TOL,
                      max_lines=None):
    """Check that the Gauss image of the pencil hypersurface is the spectral cover fiber.

    The pencil determinant ``F`` and the joint spectrum are computed from
    ``h``; smooth points of ``{F = 0}`` are sampled and each Gauss image is
    matched to the nearest ``[1 : w^a]`` in chart distance.  A sample
    matches when that distance is at most ``match_tol``.

    Unmatched samples are reported, not raised.
    """
    f = pencil_determinant(h, seed=derive_seed(seed, 'pencil'))
    spec = joint_spectrum(h, seed=derive_seed(seed, 'joint_spectrum'))
    sample = sample_hypersurface(f, samples, seed=derive_seed(seed, 'sample'),
                                 smooth_tol=smooth_tol, max_lines=max_lines)
    targets = [p.chart_point for p in spec.points]
    hits = [0] * len(targets)
    matched = 0
    worst = 0.0
    unmatched = []
    for x, img in zip(sample.points, sample.gauss_images):
        dists = [chart_distance(img, t) for t in targets]
        k = int(np.argmin(dists))
        worst = max(worst, dists[k])
        if dists[k] <= match_tol:
            matched += 1
            hits[k] += 1
        else:
            unmatched.append((x, img))
    return DualityReport(
        samples_used=len(sample.points), matched=matched, max_match_distance=worst,
        spectrum_hit_counts=tuple(hits), unmatched_samples=tuple(unmatched), spectrum=spec,
        samples_requested=samples, match_tol=match_tol, sampling_partial=sample.partial,
        everywhere_singular=sample.everywhere_singular, pencil=f)


@dataclass(frozen=True)
class HitchinReport:
    """The dual curve in the chart ``y0 = 1`` against the characteristic polynomial."""
    dual_polynomial: MultiPoly
    dual_chart: UniPoly
    characteristic: UniPoly
    deviation: float


def hitchin_check(phi, seed=0):
    """Compare ``det(y1 I - y0 phi)`` at ``y0 = 1`` with ``det(w I - phi)``.

    The bivariate dual curve polynomial is built by interpolation; its
    ``y0^(n-k) y1^k`` coefficient is the ``w^k`` coefficient in the chart.
    ``deviation`` is the largest coefficient difference relative to the
    largest characteristic polynomial coefficient.
    """
    phi = as_matrix(phi, 'phi')
    n = phi.shape[0]
    eye = np.eye(n)

    def oracle(ys):
        return np.linalg.det(ys[:, 1, None, None] * eye - ys[:, 0, None, None] * phi)

    dual = interpolate_homogeneous(2, n, oracle, seed=seed, batch=True)
    chart = UniPoly([dual.coefficient((n - k, k)) for k in range(n + 1)])
    char = char_poly_direction(HiggsTuple([phi]), [1.0])
    a, b = chart.padded(n + 1), char.padded(n + 1)
    dev = float(np.max(np.abs(a - b)) / np.max(np.abs(b)))
    return HitchinReport(dual, chart, char, dev)
