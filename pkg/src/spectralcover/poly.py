"""Sparse homogeneous multivariate polynomials and dense univariate ones.

Monomials of a homogeneous polynomial are ordered graded-lexicographically
with ``x0 > x1 > ...``; since all stored exponents share one total degree
this is plain descending lexicographic order on exponent tuples.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from ._seeding import rng_for
from .errors import InterpolationError, ShapeError
from .matkernel import eigenvalues, frozen

__all__ = ['MultiPoly', 'UniPoly', 'ProjectivePoint', 'monomials',
           'evaluate', 'gradient', 'restrict_to_line', 'uni_roots',
           'discriminant', 'interpolate_homogeneous', 'PRUNE_RTOL']

PRUNE_RTOL = 1e-12
NORMALIZATION_FLOOR = 1e-300


@lru_cache(maxsize=None)
def _monomials(num_vars, degree):
    def parts(k, d):
        if k == 1:
            yield (d,)
            return
        for first in range(d, -1, -1):
            for rest in parts(k - 1, d - first):
                yield (first,) + rest
    return tuple(parts(num_vars, degree))


def monomials(num_vars, degree):
    """Exponent tuples of all degree-``degree`` monomials, graded-lex order."""
    if num_vars < 1 or degree < 0:
        raise ValueError('need num_vars >= 1 and degree >= 0')
    return _monomials(num_vars, degree)


def _as_vector(x, name='point'):
    v = np.asarray(x, dtype=complex)
    if v.ndim != 1:
        raise ShapeError(f'{name} must be one-dimensional, got shape {v.shape}')
    return v


class MultiPoly:
    """Homogeneous polynomial in ``num_vars`` variables with complex coefficients.

    Terms are stored as a mapping from exponent tuple to coefficient.
    Coefficients below ``PRUNE_RTOL`` times the largest one are dropped at
    construction unless ``prune=False``.
    """

    __slots__ = ('num_vars', 'degree', '_terms', '_exps', '_coefs')

    def __init__(self, num_vars, degree, terms, prune=True):
        if num_vars < 1 or degree < 0:
            raise ValueError('need num_vars >= 1 and degree >= 0')
        clean = {}
        for exp, c in dict(terms).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != num_vars:
                raise ShapeError(f'exponent {exp} has length {len(exp)}, expected {num_vars}')
            if min(exp) < 0 or sum(exp) != degree:
                raise ValueError(f'exponent {exp} is not a degree-{degree} monomial')
            c = complex(c)
            if not np.isfinite(c.real) or not np.isfinite(c.imag):
                raise ValueError(f'non-finite coefficient for {exp}')
            if c != 0:
                clean[exp] = clean.get(exp, 0j) + c
        if prune and clean:
            cut = PRUNE_RTOL * max(abs(c) for c in clean.values())
            clean = {e: c for e, c in clean.items() if abs(c) > cut}
        order = sorted(clean, reverse=True)
        self.num_vars = int(num_vars)
        self.degree = int(degree)
        self._terms = {e: clean[e] for e in order}
        self._exps = frozen(np.array(order, dtype=int).reshape(len(order), num_vars))
        self._coefs = frozen(np.array([clean[e] for e in order], dtype=complex))

    @classmethod
    def zero(cls, num_vars, degree):
        return cls(num_vars, degree, {})

    @classmethod
    def from_coefficients(cls, num_vars, degree, coefficients, prune=True):
        """Build from a dense coefficient vector in graded-lex order."""
        mons = monomials(num_vars, degree)
        coefficients = np.asarray(coefficients, dtype=complex).ravel()
        if len(coefficients) != len(mons):
            raise ShapeError(f'expected {len(mons)} coefficients, got {len(coefficients)}')
        return cls(num_vars, degree, dict(zip(mons, coefficients)), prune=prune)

    @classmethod
    def linear(cls, coefficients):
        """The linear form ``sum_i c_i x_i``."""
        coefficients = _as_vector(coefficients, 'coefficients')
        k = len(coefficients)
        terms = {tuple(int(i == j) for j in range(k)): c for i, c in enumerate(coefficients)}
        return cls(k, 1, terms, prune=False)

    @classmethod
    def constant(cls, num_vars, value=1.0):
        return cls(num_vars, 0, {(0,) * num_vars: value})

    @property
    def terms(self):
        return dict(self._terms)

    @property
    def is_zero(self):
        return not self._terms

    def coefficient(self, exp):
        return self._terms.get(tuple(exp), 0j)

    def coefficient_vector(self):
        """Dense coefficients over all monomials, graded-lex order."""
        return np.array([self._terms.get(e, 0j) for e in monomials(self.num_vars, self.degree)])

    def coefficient_scale(self):
        """Largest coefficient magnitude (0 for the zero polynomial)."""
        return float(np.max(np.abs(self._coefs))) if len(self._coefs) else 0.0

    def __call__(self, x):
        return evaluate(self, x)

    def __eq__(self, other):
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return (self.num_vars == other.num_vars and self.degree == other.degree
                and self._terms == other._terms)

    def __hash__(self):
        return hash((self.num_vars, self.degree, tuple(self._terms.items())))

    def _check_compatible(self, other):
        if self.num_vars != other.num_vars:
            raise ShapeError(f'variable counts differ: {self.num_vars} vs {other.num_vars}')

    def __add__(self, other):
        if not isinstance(other, MultiPoly):
            return NotImplemented
        self._check_compatible(other)
        if other.is_zero:
            return self
        if self.is_zero:
            return other
        if self.degree != other.degree:
            raise ValueError('sum of homogeneous polynomials of different degree')
        terms = dict(self._terms)
        for e, c in other._terms.items():
            terms[e] = terms.get(e, 0j) + c
        return MultiPoly(self.num_vars, self.degree, terms)

    def __neg__(self):
        return MultiPoly(self.num_vars, self.degree, {e: -c for e, c in self._terms.items()},
                         prune=False)

    def __sub__(self, other):
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, MultiPoly):
            self._check_compatible(other)
            terms = {}
            for e1, c1 in self._terms.items():
                for e2, c2 in other._terms.items():
                    e = tuple(a + b for a, b in zip(e1, e2))
                    terms[e] = terms.get(e, 0j) + c1 * c2
            return MultiPoly(self.num_vars, self.degree + other.degree, terms)
        if np.isscalar(other):
            return MultiPoly(self.num_vars, self.degree,
                             {e: c * other for e, c in self._terms.items()})
        return NotImplemented

    __rmul__ = __mul__

    def __repr__(self):
        return f'MultiPoly(num_vars={self.num_vars}, degree={self.degree}, terms={self._terms!r})'

    def __str__(self):
        if self.is_zero:
            return '0'
        out = []
        for e, c in self._terms.items():
            mono = '*'.join(f'x{i}' + (f'^{k}' if k > 1 else '') for i, k in enumerate(e) if k)
            out.append(f'({c.real:.12g}{c.imag:+.12g}j)' + (f'*{mono}' if mono else ''))
        return ' + '.join(out)

    def to_text(self):
        """Canonical serialization: one ``e0 e1 ... : re im`` line per term."""
        header = f'# num_vars {self.num_vars} degree {self.degree}\n'
        lines = [' '.join(str(k) for k in e) + f' : {c.real!r} {c.imag!r}'
                 for e, c in self._terms.items()]
        return header + ''.join(line + '\n' for line in lines)

    @classmethod
    def from_text(cls, text, num_vars=None, degree=None):
        """Inverse of :meth:`to_text`; the header may be omitted if sizes are given."""
        terms = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith('#'):
                parts = line[1:].split()
                if len(parts) == 4 and parts[0] == 'num_vars' and parts[2] == 'degree':
                    num_vars, degree = int(parts[1]), int(parts[3])
                continue
            try:
                lhs, rhs = line.split(':')
                exp = tuple(int(k) for k in lhs.split())
                re, im = (float(s) for s in rhs.split())
            except ValueError as exc:
                raise ValueError(f'line {lineno}: cannot parse term {raw!r}') from exc
            terms[exp] = complex(re, im)
        if num_vars is None or degree is None:
            if not terms:
                raise ValueError('empty polynomial text needs num_vars and degree')
            first = next(iter(terms))
            num_vars, degree = len(first), sum(first)
        return cls(num_vars, degree, terms, prune=False)


def evaluate(p, x):
    """Evaluate ``p`` at ``x``.

    ``x`` may also be a stack of points with shape ``(..., num_vars)``, in
    which case an array of values is returned.
    """
    x = np.asarray(x, dtype=complex)
    if x.shape[-1:] != (p.num_vars,):
        raise ShapeError(f'point has {x.shape[-1] if x.ndim else 0} coordinates, '
                         f'polynomial has {p.num_vars} variables')
    if p.is_zero:
        vals = np.zeros(x.shape[:-1], dtype=complex)
    else:
        powers = np.prod(x[..., None, :] ** p._exps, axis=-1)
        vals = powers @ p._coefs
    return complex(vals) if x.ndim == 1 else vals


def gradient(p):
    """Partial derivatives of ``p``, one homogeneous polynomial per variable."""
    if p.degree < 1:
        raise ValueError('gradient of a degree-0 polynomial is not homogeneous of degree -1')
    out = []
    for i in range(p.num_vars):
        terms = {}
        for e, c in p._terms.items():
            if e[i]:
                de = e[:i] + (e[i] - 1,) + e[i + 1:]
                terms[de] = c * e[i]
        out.append(MultiPoly(p.num_vars, p.degree - 1, terms, prune=False))
    return out


class UniPoly:
    """Dense univariate polynomial, constant coefficient first.

    Trailing (leading-power) zero coefficients are stripped, so the last
    stored coefficient is nonzero.  The zero polynomial stores no
    coefficients and reports degree ``-1``.
    """

    __slots__ = ('_c',)

    def __init__(self, coefficients):
        c = np.array(coefficients, dtype=complex).ravel()
        if not np.all(np.isfinite(c)):
            raise ValueError('non-finite coefficient')
        nz = np.flatnonzero(c)
        c = c[:nz[-1] + 1] if len(nz) else c[:0]
        c.flags.writeable = False
        self._c = c

    @property
    def coefficients(self):
        return self._c

    @property
    def degree(self):
        return len(self._c) - 1

    @property
    def is_zero(self):
        return len(self._c) == 0

    def padded(self, length):
        """Coefficients zero-padded to ``length`` entries."""
        out = np.zeros(length, dtype=complex)
        out[:len(self._c)] = self._c
        return out

    def trimmed(self, rtol):
        """Drop leading coefficients below ``rtol`` times the largest one."""
        if self.is_zero:
            return self
        cut = rtol * np.max(np.abs(self._c))
        c = self._c.copy()
        c[np.abs(c) <= cut] = 0
        return UniPoly(c)

    def derivative(self):
        if self.degree < 1:
            return UniPoly([])
        return UniPoly(self._c[1:] * np.arange(1, len(self._c)))

    def __call__(self, t):
        t = np.asarray(t, dtype=complex)
        out = np.zeros_like(t)
        for c in self._c[::-1]:
            out = out * t + c
        return complex(out) if out.ndim == 0 else out

    def __eq__(self, other):
        if not isinstance(other, UniPoly):
            return NotImplemented
        return np.array_equal(self._c, other._c)

    def __repr__(self):
        return f'UniPoly({self._c.tolist()!r})'

    @classmethod
    def from_roots(cls, roots, leading=1.0):
        c = np.array([leading], dtype=complex)
        for r in roots:
            c = np.concatenate([[0], c]) - r * np.concatenate([c, [0]])
        return cls(c)


def restrict_to_line(p, base, direction):
    """Coefficients of ``t -> p(base + t*direction)``.

    The values at ``degree + 1`` points on a circle are turned into
    coefficients with a discrete Fourier transform, which is exact for
    polynomials of that degree and well conditioned.  Coefficients below
    ``PRUNE_RTOL`` relative to the natural scale of the line are zeroed, so
    a line lying inside the hypersurface restricts to the zero polynomial.
    """
    base = _as_vector(base, 'base')
    direction = _as_vector(direction, 'direction')
    if len(base) != p.num_vars or len(direction) != p.num_vars:
        raise ShapeError(f'line needs {p.num_vars} coordinates, got '
                         f'{len(base)} and {len(direction)}')
    dnorm = np.linalg.norm(direction)
    if dnorm == 0:
        raise ValueError('line direction is zero')
    n = p.degree
    if p.is_zero:
        return UniPoly([])
    bnorm = np.linalg.norm(base)
    radius = bnorm / dnorm if bnorm > 0 else 1.0
    k = np.arange(n + 1)
    ts = radius * np.exp(2j * np.pi * k / (n + 1))
    vals = evaluate(p, base[None, :] + ts[:, None] * direction[None, :])
    # forward DFT index k picks out the t^k coefficient
    coefs = np.fft.fft(vals) / (n + 1) / radius ** k
    scale = p.coefficient_scale() * (bnorm + radius * dnorm) ** n
    noise = PRUNE_RTOL * scale / np.maximum(radius, 1e-300) ** k
    coefs[np.abs(coefs) <= noise] = 0
    return UniPoly(coefs)


def uni_roots(q):
    """All complex roots of ``q`` with multiplicity, via its companion matrix."""
    if q.is_zero:
        raise ValueError('the zero polynomial has no finite root set')
    if q.degree < 1:
        raise ValueError('a nonzero constant has no roots')
    c = q.coefficients
    n = q.degree
    comp = np.zeros((n, n), dtype=complex)
    comp[1:, :-1] = np.eye(n - 1)
    comp[:, -1] = -c[:-1] / c[-1]
    return eigenvalues(comp)


def _sylvester(f, g):
    f = f[::-1]
    g = g[::-1]
    m, n = len(f) - 1, len(g) - 1
    s = np.zeros((m + n, m + n), dtype=complex)
    for i in range(n):
        s[i, i:i + m + 1] = f
    for i in range(m):
        s[n + i, i:i + n + 1] = g
    return s


def discriminant(q):
    """Discriminant of ``q`` via the resultant ``Res(q, q')``.

    ``disc(q) = (-1)^(n(n-1)/2) Res(q, q') / a_n`` for degree ``n`` with
    leading coefficient ``a_n``.
    """
    n = q.degree
    if n < 2:
        raise ValueError(f'discriminant needs degree >= 2, got {n}')
    c = q.coefficients
    res = np.linalg.det(_sylvester(c, q.derivative().coefficients))
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    return complex(sign * res / c[-1])


def _torus_nodes(rng, count, num_vars):
    return np.exp(2j * np.pi * rng.random((count, num_vars)))


def interpolate_homogeneous(num_vars, degree, oracle, *, seed=0, tol=1e-8,
                            scale=None, batch=False, max_condition=1e10):
    """Recover a homogeneous polynomial from point evaluations.

    The oracle is sampled at random points of the unit torus
    ``|x_0| = ... = |x_k| = 1``; the square system on ``binom(degree +
    num_vars - 1, degree)`` nodes is solved, then the fit is certified on
    25% additional held-out nodes.

    Parameters
    ----------
    num_vars, degree : int
        Shape of the target polynomial.
    oracle : callable
        Maps a coordinate vector to a complex value.  With ``batch=True`` it
        instead receives an ``(m, num_vars)`` array and returns ``m`` values.
    seed : int
        Node seed.  The node set is re-drawn once if its condition number
        exceeds ``max_condition``.
    tol : float
        Held-out residual bound, relative to ``max(scale, max |value|)``; pruning ignores it.
    scale : float, optional
        Expected magnitude of the oracle on the torus.  Needed when the
        oracle may be identically (numerically) zero.

    Raises
    ------
    InterpolationError
        If the node system is singular or the held-out residual is too big.
    """
    if num_vars < 1 or degree < 0:
        raise ValueError('need num_vars >= 1 and degree >= 0')
    mons = monomials(num_vars, degree)
    exps = np.array(mons, dtype=int)
    size = len(mons)
    extra = max(1, -(-size // 4))

    def call(points):
        # overflow surfaces as non-finite values and is reported below
        with np.errstate(over='ignore', invalid='ignore'):
            if batch:
                return np.asarray(oracle(points), dtype=complex).reshape(len(points))
            return np.array([complex(oracle(pt)) for pt in points])

    best = None
    for attempt in range(2):
        rng = rng_for(seed, 'interpolate', num_vars, degree, attempt)
        nodes = _torus_nodes(rng, size + extra, num_vars)
        vander = np.prod(nodes[:, None, :] ** exps[None, :, :], axis=-1)
        cond = np.linalg.cond(vander[:size])
        if best is None or cond < best[0]:
            best = (cond, nodes, vander)
        if cond <= max_condition:
            break
    cond, nodes, vander = best
    if not np.isfinite(cond) or cond * np.finfo(float).eps >= 1e-2:
        raise InterpolationError(
            f'interpolation system is numerically singular (condition {cond:.3e})', cond)

    values = call(nodes)
    if not np.all(np.isfinite(values)):
        raise InterpolationError('oracle returned non-finite values', cond)
    coefs = np.linalg.solve(vander[:size], values[:size])
    predicted = vander[size:] @ coefs
    ref = max(scale or 0.0, float(np.max(np.abs(values))), np.finfo(float).tiny)
    resid = float(np.max(np.abs(predicted - values[size:]))) / ref
    if resid > tol:
        raise InterpolationError(
            f'held-out residual {resid:.3e} exceeds {tol:.1e}: oracle is not a '
            f'homogeneous polynomial of degree {degree} (condition {cond:.3e})', cond, resid)
    # prune against observed magnitudes; a loose a-priori scale would erase real terms
    cut = PRUNE_RTOL * max(float(np.max(np.abs(values))), float(np.max(np.abs(coefs))))
    coefs[np.abs(coefs) <= cut] = 0
    return MultiPoly(num_vars, degree, dict(zip(mons, coefs)), prune=False)


class ProjectivePoint:
    """Point of projective space, stored with its largest coordinate scaled to 1."""

    __slots__ = ('coords',)

    def __init__(self, coords):
        c = _as_vector(coords, 'coordinates').copy()
        if len(c) == 0:
            raise ShapeError('projective point needs at least one coordinate')
        if not np.all(np.isfinite(c)):
            raise ValueError('non-finite projective coordinates')
        mags = np.abs(c)
        k = int(np.argmax(mags))
        if mags[k] <= NORMALIZATION_FLOOR:
            raise ValueError('all projective coordinates are zero')
        c = c / c[k]
        c[k] = 1.0
        object.__setattr__(self, 'coords', frozen(c))

    @property
    def dim(self):
        return len(self.coords) - 1

    def chart(self, index=0, floor=1e-6):
        """Affine coordinates in the chart ``x_index = 1``, or None near infinity."""
        c = self.coords
        if abs(c[index]) < floor * np.linalg.norm(c):
            return None
        return np.delete(c / c[index], index)

    def __eq__(self, other):
        if not isinstance(other, ProjectivePoint):
            return NotImplemented
        return np.array_equal(self.coords, other.coords)

    def __hash__(self):
        return hash(self.coords.tobytes())

    def isclose(self, other, tol=1e-10):
        a, b = self.coords, other.coords
        return len(a) == len(b) and 1 - abs(np.vdot(a, b)) / (np.linalg.norm(a) * np.linalg.norm(b)) <= tol

    def __repr__(self):
        return 'ProjectivePoint([' + ' : '.join(f'{z:.6g}' for z in self.coords) + '])'
