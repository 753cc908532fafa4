from math import comb

import numpy as np
import pytest
from hypothesis import given, strategies as st

from spectralcover.errors import CommutativityError, JointSpectrumError, ShapeError
from spectralcover.higgs import (HiggsTuple, char_poly_direction, characteristic_polynomial,
                                 check_commuting, exterior_trace, joint_spectrum,
                                 pencil_determinant, power_traces, spectral_residuals,
                                 spectrum_determinant_residual)
from spectralcover.poly import evaluate, monomials

from _support import (charpoly_from_minors, cplx, diagonalizable_tuple, gauge, leibniz_det,
                      linear_product_coefficients, multiset_distance, principal_minor_sum)

DIAG_PAIR = [np.diag([1.0, 2.0]), np.diag([3.0, 4.0])]
NILPOTENT_PAIR = [np.array([[0.0, 1.0], [0.0, 0.0]]), np.array([[0.0, 5.0], [0.0, 0.0]])]
SWAP = np.array([[0.0, 1.0], [1.0, 0.0]])


# -- commutativity ------------------------------------------------------------

def test_check_commuting_diagonal():
    rep = check_commuting(DIAG_PAIR)
    assert rep.max_commutator == 0 and rep.passed


def test_check_commuting_powers(rng):
    m = cplx(rng, 4, 4)
    assert check_commuting([m, m @ m, m @ m @ m]).passed


def test_check_commuting_failure_value():
    rep = check_commuting([np.diag([1.0, 2.0]), SWAP], tol=1e-8)
    # sqrt(2) over ||diag(1,2)|| ||swap|| = sqrt(5) sqrt(2)
    assert rep.max_commutator == pytest.approx(np.sqrt(2) / (np.sqrt(5) * np.sqrt(2)), rel=1e-14)
    assert not rep.passed
    assert rep.worst_pair == (0, 1)


def test_check_commuting_shape_mismatch():
    with pytest.raises(ShapeError):
        check_commuting([np.eye(2), np.eye(3)])
    with pytest.raises(ShapeError):
        check_commuting([])


def test_higgs_tuple_rejects_noncommuting():
    with pytest.raises(CommutativityError) as info:
        HiggsTuple([np.diag([1.0, 2.0]), SWAP])
    assert not info.value.report.passed
    h = HiggsTuple([np.diag([1.0, 2.0]), SWAP], force=True)
    assert not h.certificate.passed


def test_higgs_tuple_is_immutable():
    h = HiggsTuple(DIAG_PAIR)
    assert (h.n, h.d) == (2, 2)
    assert not h.components.flags.writeable
    with pytest.raises(AttributeError):
        h.extra = 1


# -- joint spectrum -----------------------------------------------------------

def _points(spec):
    return {(tuple(np.round(p.w, 9)), p.multiplicity) for p in spec.points}


def test_joint_spectrum_diagonal():
    spec = joint_spectrum(HiggsTuple(DIAG_PAIR))
    assert _points(spec) == {((1, 3), 1), ((2, 4), 1)}


def test_joint_spectrum_nilpotent():
    spec = joint_spectrum(HiggsTuple(NILPOTENT_PAIR))
    assert _points(spec) == {((0, 0), 2)}
    assert spec.n == 2


def test_joint_spectrum_triangular_powers():
    a = np.array([[1.0, 1.0], [0.0, 2.0]])
    spec = joint_spectrum(HiggsTuple([a, a @ a]))
    assert _points(spec) == {((1, 1), 1), ((2, 4), 1)}


def test_joint_spectrum_seeded_determinism(rng):
    mats, _ = diagonalizable_tuple(rng, 5, 3)
    h = HiggsTuple(mats)
    a, b = joint_spectrum(h, seed=4), joint_spectrum(h, seed=4)
    assert a.points == b.points and a.residual == b.residual


@pytest.mark.parametrize('n,d', [(2, 1), (3, 2), (5, 3), (6, 4)])
def test_joint_spectrum_recovers_planted_points(n, d):
    rng = np.random.default_rng(n * 10 + d)
    mats, w = diagonalizable_tuple(rng, n, d)
    spec = joint_spectrum(HiggsTuple(mats))
    assert spec.n == n
    assert multiset_distance(spec.as_array(), w) <= 1e-8
    assert spectrum_determinant_residual(HiggsTuple(mats), spec) <= 1e-8


def test_joint_spectrum_counts_multiplicity():
    rng = np.random.default_rng(1)
    w = np.array([[1.0, 2.0], [1.0, 2.0], [3.0, -1.0]])
    g = gauge(rng, 3, 10.0)
    gi = np.linalg.inv(g)
    mats = [g @ np.diag(w[:, j]) @ gi for j in range(2)]
    spec = joint_spectrum(HiggsTuple(mats))
    assert sorted(p.multiplicity for p in spec.points) == [1, 2]


def test_joint_spectrum_error_carries_residual():
    # forced non-commuting input has no common triangularizing basis
    h = HiggsTuple([np.diag([1.0, 2.0]), SWAP], force=True)
    with pytest.raises(JointSpectrumError) as info:
        joint_spectrum(h, retries=3)
    assert info.value.residual > 1e-8
    assert info.value.attempts == 1 + 3  # first draw plus retries


# -- pencil determinant -------------------------------------------------------

def test_pencil_swap():
    f = pencil_determinant(HiggsTuple([SWAP]))
    np.testing.assert_allclose(f.coefficient_vector(), [1, 0, -1], atol=1e-13)


def test_pencil_nilpotent():
    f = pencil_determinant(HiggsTuple(NILPOTENT_PAIR))
    np.testing.assert_allclose(f.coefficient_vector(), [1, 0, 0, 0, 0, 0], atol=1e-13)
    assert set(f.terms) == {(2, 0, 0)}


def test_pencil_diagonal():
    f = pencil_determinant(HiggsTuple(DIAG_PAIR))
    want = linear_product_coefficients([(1, 1, 3), (1, 2, 4)], monomials(3, 2))
    np.testing.assert_allclose(f.coefficient_vector(), want, atol=1e-12)


def test_pencil_matches_leibniz(rng):
    mats = [cplx(rng, 3, 3) for _ in range(2)]
    h = HiggsTuple(mats, force=True)
    f = pencil_determinant(h)
    for _ in range(5):
        xi = cplx(rng, 3)
        m = xi[0] * np.eye(3) + xi[1] * mats[0] + xi[2] * mats[1]
        want = leibniz_det(m.tolist())
        assert abs(evaluate(f, xi) - want) <= 1e-10 * (1 + abs(want))


def test_pencil_consistency_with_char_poly(rng):
    mats, _ = diagonalizable_tuple(rng, 4, 3)
    h = HiggsTuple(mats)
    f = pencil_determinant(h)
    for _ in range(20):
        v, w = cplx(rng, 3), complex(*rng.standard_normal(2))
        lhs = char_poly_direction(h, v)(w)
        rhs = (-1) ** h.n * evaluate(f, np.concatenate([[-w], v]))
        assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(lhs))


# -- characteristic polynomial, exterior and power traces ---------------------

def test_char_poly_examples():
    np.testing.assert_allclose(char_poly_direction(HiggsTuple([SWAP]), [1]).coefficients,
                               [-1, 0, 1], atol=1e-15)
    h = HiggsTuple(DIAG_PAIR)
    np.testing.assert_allclose(char_poly_direction(h, [0, 0]).coefficients, [0, 0, 1])
    np.testing.assert_allclose(char_poly_direction(h, [1, 1]).coefficients, [24, -10, 1])


def test_char_poly_shape_check():
    with pytest.raises(ShapeError):
        char_poly_direction(HiggsTuple(DIAG_PAIR), [1])


@pytest.mark.parametrize('n', range(1, 9))
def test_characteristic_polynomial_vs_minors(n):
    rng = np.random.default_rng(300 + n)
    a = cplx(rng, n, n)
    got = characteristic_polynomial(a).padded(n + 1)
    want = charpoly_from_minors(a)
    assert np.max(np.abs(got - want)) <= 1e-10 * np.max(np.abs(want))


def test_exterior_trace_examples(rng):
    assert exterior_trace(np.diag([1.0, 2.0, 3.0]), 2) == pytest.approx(11)
    a = cplx(rng, 4, 4)
    assert exterior_trace(a, 0) == 1
    assert exterior_trace(a, 4) == pytest.approx(np.linalg.det(a), rel=1e-12)


def test_exterior_trace_range():
    with pytest.raises(ValueError):
        exterior_trace(np.eye(2), 3)
    with pytest.raises(ValueError):
        exterior_trace(np.eye(2), -1)


@pytest.mark.parametrize('m', range(0, 6))
def test_exterior_trace_is_principal_minor_sum(m):
    rng = np.random.default_rng(m)
    a = cplx(rng, 5, 5)
    want = principal_minor_sum(a, m)
    assert abs(exterior_trace(a, m) - want) <= 1e-11 * max(1.0, abs(want))


def test_power_traces_examples():
    np.testing.assert_allclose(power_traces(HiggsTuple([np.diag([1.0, 2.0])]), [1], 2), [3, 5])
    h = HiggsTuple(DIAG_PAIR)
    np.testing.assert_allclose(power_traces(h, [0, 0], 3), [0, 0, 0])
    np.testing.assert_allclose(power_traces(h, [1, 1], 2), [10, 52])


@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_newton_identities(n, seed):
    rng = np.random.default_rng(seed)
    mats, _ = diagonalizable_tuple(rng, n, 2, 10.0)
    h = HiggsTuple(mats)
    v = cplx(rng, 2)
    a = h.combination(v)
    p = power_traces(h, v, n)
    e = [exterior_trace(a, m) for m in range(n + 1)]
    scale = max(1.0, np.max(np.abs(p)))
    for k in range(1, n + 1):
        total = p[k - 1] + sum((-1) ** i * e[i] * p[k - i - 1] for i in range(1, k)) \
            + (-1) ** k * k * e[k]
        assert abs(total) <= 1e-8 * scale


# -- overdetermined residual system -------------------------------------------

def test_residuals_at_joint_eigenvalue():
    rep = spectral_residuals(HiggsTuple(DIAG_PAIR), [1, 3])
    assert rep.equation_count == 3 == comb(3, 2)
    assert rep.max_magnitude <= 1e-12


def test_residuals_at_origin():
    rep = spectral_residuals(HiggsTuple(DIAG_PAIR), [0, 0])
    # (v1 + 3 v2)(2 v1 + 4 v2) = 2 v1^2 + 10 v1 v2 + 12 v2^2
    np.testing.assert_allclose(rep.coefficients, [2, 10, 12], atol=1e-12)
    assert rep.max_magnitude == pytest.approx(12, rel=1e-12)


def test_residuals_rank_one_at_eigenvalue(rng):
    a = cplx(rng, 4, 4)
    w = np.linalg.eigvals(a)[0]
    rep = spectral_residuals(HiggsTuple([a]), [w])
    assert rep.equation_count == 1
    assert rep.scaled_max <= 1e-12


def test_residuals_shape_check():
    with pytest.raises(ShapeError):
        spectral_residuals(HiggsTuple(DIAG_PAIR), [1])


# -- gauge invariance ---------------------------------------------------------

@pytest.mark.parametrize('n,d', [(2, 2), (4, 3), (6, 1)])
def test_gauge_invariance(n, d):
    rng = np.random.default_rng(n + 7 * d)
    mats, w = diagonalizable_tuple(rng, n, d, 10.0)
    h = HiggsTuple(mats)
    base = joint_spectrum(h).as_array()
    for k in range(5):
        moved = joint_spectrum(h.conjugate(gauge(rng, n, 10.0)), seed=k).as_array()
        assert multiset_distance(base, moved) <= 1e-7 * (1 + np.abs(w).max())
