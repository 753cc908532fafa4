import numpy as np
import pytest
from hypothesis import given, strategies as st

from spectralcover.duality import (Hyperplane, chart_distance, dual_point, gauss_map,
                                   hitchin_check, incidence, linear_factorization,
                                   sample_hypersurface, verify_dual_cover)
from spectralcover.errors import (JointSpectrumError, NotOnHypersurfaceError, ShapeError,
                                  SingularPointError)
from spectralcover.higgs import HiggsTuple, joint_spectrum, pencil_determinant
from spectralcover.poly import MultiPoly, ProjectivePoint, evaluate

from _support import cplx, diagonalizable_tuple

DIAG_PAIR = [np.diag([1.0, 2.0]), np.diag([3.0, 4.0])]
NILPOTENT_PAIR = [np.array([[0.0, 1.0], [0.0, 0.0]]), np.array([[0.0, 5.0], [0.0, 0.0]])]
SWAP = np.array([[0.0, 1.0], [1.0, 0.0]])
X0SQ_MINUS_X1SQ = MultiPoly(2, 2, {(2, 0): 1, (0, 2): -1})


# -- hyperplanes, dual points, incidence --------------------------------------

def test_dual_point_examples():
    assert dual_point(Hyperplane([1, 0, 0])) == ProjectivePoint([1, 0, 0])
    assert dual_point(Hyperplane([2, 2, 6])).isclose(ProjectivePoint([1, 1, 3]))
    w = [0.5 - 1j, 2.0]
    np.testing.assert_allclose(dual_point(Hyperplane([1, *w])).chart(0), w, atol=1e-15)


def test_incidence_examples():
    assert incidence(Hyperplane([1, -1]), ProjectivePoint([1, 1]))
    assert not incidence(Hyperplane([1, 0]), ProjectivePoint([1, 5]))
    assert incidence(Hyperplane([1, 1, 3]), ProjectivePoint([0, 3, -1]))


def test_incidence_shape_mismatch():
    with pytest.raises(ShapeError):
        incidence(Hyperplane([1, 1]), ProjectivePoint([1, 1, 1]))


@given(st.lists(st.integers(-5, 5), min_size=3, max_size=3).filter(any),
       st.lists(st.integers(-5, 5), min_size=3, max_size=3).filter(any))
def test_incidence_pairing_symmetry(a, b):
    hp, hq = Hyperplane(a), Hyperplane(b)
    assert incidence(hp, dual_point(hq)) == incidence(hq, dual_point(hp))


def test_chart_distance_in_chart_and_at_infinity():
    assert chart_distance(ProjectivePoint([1, 2]), ProjectivePoint([2, 4])) == pytest.approx(0)
    assert chart_distance([1, 1, 3], [1, 2, 4]) == pytest.approx(np.sqrt(2))
    # a point at infinity falls back to the chart-free distance
    assert chart_distance([0, 1], [0, 2]) == pytest.approx(0, abs=1e-15)
    assert chart_distance([0, 1], [1, 0]) == pytest.approx(1)


# -- gauss map ----------------------------------------------------------------

def test_gauss_map_examples():
    assert gauss_map(X0SQ_MINUS_X1SQ, ProjectivePoint([1, 1])).isclose(ProjectivePoint([1, -1]))
    with pytest.raises(SingularPointError):
        gauss_map(MultiPoly(2, 2, {(2, 0): 1}), ProjectivePoint([0, 1]))


def test_gauss_map_on_product_of_planes(rng):
    f = MultiPoly.linear([1, 1, 3]) * MultiPoly.linear([1, 2, 4])
    # generic point of the first plane: x0 = -(x1 + 3 x2)
    x1, x2 = cplx(rng, 2)
    xi = ProjectivePoint([-(x1 + 3 * x2), x1, x2])
    assert gauss_map(f, xi).isclose(ProjectivePoint([1, 1, 3]), 1e-12)


def test_gauss_map_off_surface():
    with pytest.raises(NotOnHypersurfaceError):
        gauss_map(X0SQ_MINUS_X1SQ, ProjectivePoint([1, 2]))


def test_gauss_map_errors_are_distinct():
    assert not issubclass(SingularPointError, NotOnHypersurfaceError)
    assert not issubclass(NotOnHypersurfaceError, SingularPointError)


@pytest.mark.parametrize('n', [2, 3, 5])
def test_gauss_map_projectively_well_defined(n):
    rng = np.random.default_rng(n)
    mats, _ = diagonalizable_tuple(rng, n, 2, 10.0)
    f = pencil_determinant(HiggsTuple(mats))
    sample = sample_hypersurface(f, 10, seed=n)
    for pt, img in zip(sample.points, sample.gauss_images):
        lam = complex(*rng.standard_normal(2))
        moved = gauss_map(f, pt.coords * lam)
        assert moved.isclose(gauss_map(f, pt), 1e-10)
        assert img.isclose(moved, 1e-10)


# -- sampling -----------------------------------------------------------------

def test_sample_two_lines():
    s = sample_hypersurface(X0SQ_MINUS_X1SQ, 10, seed=1)
    assert len(s.points) == 10 and not s.partial
    for p in s.points:
        x0, x1 = p.coords
        assert min(abs(x0 - x1), abs(x0 + x1)) <= 1e-9


def test_sample_double_line_is_everywhere_singular():
    s = sample_hypersurface(MultiPoly(2, 2, {(2, 0): 1}), 10, seed=0)
    assert s.points == () and s.partial and s.everywhere_singular


def test_sample_avoids_singular_locus():
    s = sample_hypersurface(MultiPoly(3, 2, {(1, 1, 0): 1}), 10, seed=3)
    assert len(s.points) == 10
    for p in s.points:
        x = p.coords
        assert min(abs(x[0]), abs(x[1])) <= 1e-9
        assert max(abs(x[0]), abs(x[1])) >= 1e-6


def test_sample_argument_checks():
    with pytest.raises(ValueError):
        sample_hypersurface(MultiPoly.zero(2, 2), 3)
    with pytest.raises(ValueError):
        sample_hypersurface(MultiPoly.constant(2), 3)


def test_sample_is_seed_deterministic():
    a = sample_hypersurface(X0SQ_MINUS_X1SQ, 6, seed=11)
    b = sample_hypersurface(X0SQ_MINUS_X1SQ, 6, seed=11)
    assert a.points == b.points


# -- factorization and the dual cover -----------------------------------------

def test_linear_factorization_diagonal():
    spec = joint_spectrum(HiggsTuple(DIAG_PAIR))
    planes, prod = linear_factorization(spec)
    assert [(hp, m) for hp, m in planes] == [(Hyperplane([1, 1, 3]), 1), (Hyperplane([1, 2, 4]), 1)]
    f = pencil_determinant(HiggsTuple(DIAG_PAIR))
    assert np.max(np.abs(prod.coefficient_vector() - f.coefficient_vector())) < 1e-12


@pytest.mark.parametrize('n,d', [(2, 1), (3, 2), (4, 3)])
def test_gauss_image_of_each_factor_plane(n, d):
    rng = np.random.default_rng(n + d)
    mats, _ = diagonalizable_tuple(rng, n, d, 10.0)
    h = HiggsTuple(mats)
    f = pencil_determinant(h)
    spec = joint_spectrum(h)
    for p in spec.points:
        alpha = p.chart_point
        # a generic point on the factor plane alpha . x = 0
        x = cplx(rng, d + 1)
        x[0] = -np.dot(alpha[1:], x[1:])
        img = gauss_map(f, x)
        assert chart_distance(img, alpha) <= 1e-8


def test_verify_diagonal_pair():
    rep = verify_dual_cover(HiggsTuple(DIAG_PAIR), samples=200, seed=0)
    assert rep.samples_used == 200 and rep.matched == 200
    assert all(c > 0 for c in rep.spectrum_hit_counts)
    targets = {tuple(np.round(p.chart_point.real, 12)) for p in rep.spectrum.points}
    assert targets == {(1, 1, 3), (1, 2, 4)}
    assert rep.verdict == 'passed'


def test_verify_swap():
    rep = verify_dual_cover(HiggsTuple([SWAP]), samples=50, seed=2)
    assert rep.success
    ws = sorted(p.w[0].real for p in rep.spectrum.points)
    np.testing.assert_allclose(ws, [-1, 1], atol=1e-12)


def test_verify_nilpotent_is_flagged_not_failed():
    rep = verify_dual_cover(HiggsTuple(NILPOTENT_PAIR), samples=50)
    assert rep.samples_used == 0
    assert rep.everywhere_singular and rep.sampling_partial
    assert [(p.w, p.multiplicity) for p in rep.spectrum.points] == [((0j, 0j), 2)]
    assert rep.verdict == 'flagged'


def test_verify_report_accounting(rng):
    mats, _ = diagonalizable_tuple(rng, 4, 2)
    rep = verify_dual_cover(HiggsTuple(mats), samples=60, seed=5)
    assert rep.matched + len(rep.unmatched_samples) == rep.samples_used
    assert sum(rep.spectrum_hit_counts) == rep.matched


def test_verify_noncommuting_propagates_spectrum_failure():
    h = HiggsTuple([np.diag([1.0, 2.0]), SWAP], force=True)
    with pytest.raises(JointSpectrumError):
        verify_dual_cover(h, samples=20)


def test_verify_reports_unmatched_samples():
    # round-off alone exceeds a zero tolerance; misses are reported, not raised
    rep = verify_dual_cover(HiggsTuple([SWAP]), samples=30, match_tol=1e-300)
    assert rep.verdict == 'failed'
    assert rep.matched + len(rep.unmatched_samples) == 30
    assert len(rep.unmatched_samples) > 0
    sample, image = rep.unmatched_samples[0]
    assert isinstance(image, ProjectivePoint)


# -- Hitchin curve ------------------------------------------------------------

def test_hitchin_swap():
    rep = hitchin_check(SWAP)
    np.testing.assert_allclose(rep.characteristic.coefficients, [-1, 0, 1], atol=1e-15)
    np.testing.assert_allclose(rep.dual_chart.coefficients, [-1, 0, 1], atol=1e-12)
    assert rep.deviation <= 1e-12


@pytest.mark.parametrize('n', [1, 3, 5])
def test_hitchin_zero(n):
    rep = hitchin_check(np.zeros((n, n)))
    want = np.zeros(n + 1)
    want[-1] = 1
    np.testing.assert_allclose(rep.dual_chart.padded(n + 1), want, atol=1e-12)
    np.testing.assert_allclose(rep.characteristic.padded(n + 1), want)


def test_hitchin_diagonal():
    rep = hitchin_check(np.diag([1.0, 2.0, 3.0]))
    np.testing.assert_allclose(rep.dual_chart.coefficients, [-6, 11, -6, 1], atol=1e-11)
    assert rep.deviation <= 1e-12


def test_hitchin_dual_polynomial_vanishes_on_curve(rng):
    phi = cplx(rng, 4, 4)
    rep = hitchin_check(phi)
    for w in np.linalg.eigvals(phi):
        assert abs(evaluate(rep.dual_polynomial, [1, w])) <= 1e-9 * (1 + abs(w)) ** 4
