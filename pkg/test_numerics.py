import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from numerics import (
    BasisKind, BasisTag, DimensionError, NonHermitianError, NumericsError,
    StateVector, dispersion_report, expect, hermitian_eigen, interlaces,
    make_rule, poly_roots, random_density_matrix, random_state,
    sym_tridiag_eigen, variance,
)

_finite = st.floats(-10.0, 10.0, allow_nan=False, allow_infinity=False, allow_subnormal=False)


def _hermitian(re: np.ndarray, im: np.ndarray) -> np.ndarray:
    a = re + 1j * im
    return 0.5 * (a + a.conj().T)


def _random_hermitian(n: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return _hermitian(rng.standard_normal((n, n)), rng.standard_normal((n, n)))


# ---------------------------------------------------------------------------
# Hermitian eigensolver
# ---------------------------------------------------------------------------

def test_identity_spectrum():
    rep = hermitian_eigen(np.eye(3))
    np.testing.assert_allclose(rep.eigenvalues, [1.0, 1.0, 1.0])
    assert rep.property_flags["simple"] is False


def test_half_tridiagonal_three():
    a = 0.5 * (np.eye(3, k=1) + np.eye(3, k=-1))
    rep = hermitian_eigen(a)
    np.testing.assert_allclose(rep.eigenvalues, [math.sqrt(2) / 2, 0.0, -math.sqrt(2) / 2], atol=1e-14)
    assert rep.property_flags["symmetric_spectrum"]
    assert rep.property_flags["simple"]


@pytest.mark.parametrize("seed", range(5))
def test_random_matches_eigvalsh(seed):
    a = _random_hermitian(8, seed)
    rep = hermitian_eigen(a)
    np.testing.assert_allclose(rep.eigenvalues, np.linalg.eigvalsh(a)[::-1], atol=1e-9)


@pytest.mark.parametrize("seed", range(3))
def test_random_matches_characteristic_roots(seed):
    a = _random_hermitian(6, seed)
    # characteristic polynomial from the matrix, roots from our solver
    roots = np.sort(np.real(poly_roots(np.poly(a))))[::-1]
    np.testing.assert_allclose(hermitian_eigen(a).eigenvalues, roots, atol=1e-8)


def test_non_hermitian_rejected():
    a = np.array([[1.0, 2.0], [0.0, 1.0]])
    with pytest.raises(NonHermitianError) as e:
        hermitian_eigen(a)
    assert e.value.residual == pytest.approx(2.0)


def test_phase_convention():
    rep = hermitian_eigen(_random_hermitian(5, 11))
    for j in range(5):
        col = rep.eigenvectors[:, j]
        idx = int(np.argmax(np.abs(col)))
        assert abs(col[idx].imag) < 1e-14
        assert col[idx].real > 0


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 7).flatmap(lambda n: st.tuples(
    arrays(np.float64, (n, n), elements=_finite),
    arrays(np.float64, (n, n), elements=_finite),
)))
def test_eigen_residual_and_unitarity(parts):
    a = _hermitian(*parts)
    rep = hermitian_eigen(a)
    scale = max(float(np.max(np.abs(a))), 1e-300)
    assert rep.residual <= 1e-10 * scale
    V = rep.eigenvectors
    np.testing.assert_allclose(V.conj().T @ V, np.eye(a.shape[0]), atol=1e-10)
    assert np.all(np.diff(rep.eigenvalues) <= 0)


# ---------------------------------------------------------------------------
# Tridiagonal QL
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("a", [0.3, 1.0, 2.5])
def test_two_by_two(a):
    rep = sym_tridiag_eigen([0.0, 0.0], [a])
    np.testing.assert_allclose(rep.eigenvalues, [a, -a], atol=1e-14)


def test_toeplitz_four():
    rep = sym_tridiag_eigen([2.0] * 4, [1.0] * 3)
    np.testing.assert_allclose(rep.eigenvalues, [3.6180, 2.6180, 1.3820, 0.3820], atol=1e-4)


def test_tridiagonal_errors():
    with pytest.raises(DimensionError):
        sym_tridiag_eigen([], [])
    with pytest.raises(DimensionError):
        sym_tridiag_eigen([1.0, 2.0], [1.0, 1.0])


@pytest.mark.parametrize("seed", range(4))
def test_tridiagonal_agrees_with_jacobi(seed):
    rng = np.random.default_rng(seed)
    d = rng.standard_normal(9)
    e = rng.standard_normal(8)
    dense = np.diag(d) + np.diag(e, 1) + np.diag(e, -1)
    np.testing.assert_allclose(sym_tridiag_eigen(d, e).eigenvalues, hermitian_eigen(dense).eigenvalues,
                               atol=1e-10)


# ---------------------------------------------------------------------------
# Polynomial roots
# ---------------------------------------------------------------------------

def test_cubic_at_mu_one():
    roots = poly_roots([1.0, 0.0, -0.5, 0.0])
    np.testing.assert_allclose(roots, [math.sqrt(2) / 2, 0.0, -math.sqrt(2) / 2], atol=1e-12)


def test_imaginary_pair():
    roots = poly_roots([1.0, 0.0, 1.0])
    np.testing.assert_allclose(roots, [1j, -1j], atol=1e-12)


def test_integer_roots():
    roots = poly_roots(np.poly(np.arange(1, 8)))
    np.testing.assert_allclose(np.real(roots), np.arange(7, 0, -1), atol=1e-8)


def test_zero_leading_coefficient():
    with pytest.raises(NumericsError):
        poly_roots([0.0, 1.0, 2.0])


@settings(max_examples=30, deadline=None)
@given(arrays(np.float64, st.integers(2, 6), elements=st.floats(-3.0, 3.0, allow_subnormal=False)))
def test_roots_reproduce_polynomial(roots):
    coeffs = np.poly(roots)
    found = poly_roots(coeffs)
    assert np.max(np.abs(np.polyval(coeffs, found))) <= 1e-10 * np.max(np.abs(coeffs))


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("m", [1, 4, 9])
def test_trapezoid_weights(m):
    rule = make_rule("periodic_trapezoid", m)
    assert len(rule) == m
    assert rule.weights.sum() == pytest.approx(2 * math.pi, abs=1e-13)


@pytest.mark.parametrize("n", range(2, 21))
def test_gauss_legendre_exactness(n):
    rule = make_rule("gauss_legendre", n)
    assert rule.weights.sum() == pytest.approx(2.0, abs=1e-13)
    for d in range(2 * n):
        exact = 0.0 if d % 2 else 2.0 / (d + 1)
        assert rule.integrate(rule.nodes ** d) == pytest.approx(exact, abs=1e-12)


def test_gauss_legendre_interval():
    rule = make_rule("gauss_legendre", 5, (0.0, math.pi))
    assert rule.integrate(np.sin(rule.nodes)) == pytest.approx(2.0, abs=1e-5)


def test_unknown_rule():
    with pytest.raises(NumericsError):
        make_rule("simpson", 4)


# ---------------------------------------------------------------------------
# States and dispersions
# ---------------------------------------------------------------------------

def test_state_vector_checks():
    with pytest.raises(NumericsError):
        StateVector(np.array([1.0, 1.0]))
    with pytest.raises(DimensionError):
        StateVector(np.array([1.0, 0.0]), BasisTag(BasisKind.CIRCLE, 1))
    with pytest.raises(NumericsError):
        StateVector.normalized(np.zeros(3))
    v = StateVector.normalized([3.0, 4.0j])
    assert v.amplitudes[0] == pytest.approx(0.6)
    assert not v.amplitudes.flags.writeable


def test_random_state_deterministic():
    a = random_state(6, 42)
    b = random_state(6, 42)
    np.testing.assert_array_equal(a.amplitudes, b.amplitudes)
    assert np.linalg.norm(a.amplitudes) == pytest.approx(1.0, abs=1e-12)


def test_random_density_matrix():
    rho = random_density_matrix(5, 3, count=4)
    assert np.trace(rho).real == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(rho, rho.conj().T, atol=1e-15)
    assert np.min(np.linalg.eigvalsh(rho)) > -1e-12
    with pytest.raises(ValueError):
        random_density_matrix(5, 3, count=5)


def _ops(seed: int, n: int = 5):
    return [_random_hermitian(n, seed + i) for i in range(3)], [_random_hermitian(n, seed + 10 + i) for i in range(2)]


@pytest.mark.parametrize("seed", range(3))
def test_dispersion_invariances(seed):
    xs, Ls = _ops(seed)
    v = random_state(5, seed)
    ref = dispersion_report(xs, Ls, v)
    assert ref.disp_x2 >= -1e-12

    phased = dispersion_report(xs, Ls, np.exp(0.7j) * v.amplitudes)
    assert phased.disp_x2 == pytest.approx(ref.disp_x2, abs=1e-11)
    assert phased.mean_L2 == pytest.approx(ref.mean_L2, abs=1e-11)

    U, _ = np.linalg.qr(np.random.default_rng(seed).standard_normal((5, 5))
                        + 1j * np.random.default_rng(seed + 1).standard_normal((5, 5)))
    moved = dispersion_report([U @ x @ U.conj().T for x in xs], [U @ L @ U.conj().T for L in Ls],
                              U @ v.amplitudes)
    assert moved.disp_x2 == pytest.approx(ref.disp_x2, abs=1e-11)
    assert moved.disp_L2 == pytest.approx(ref.disp_L2, abs=1e-11)
    np.testing.assert_allclose(moved.mean_x, ref.mean_x, atol=1e-11)


def test_density_matrix_of_pure_state():
    xs, Ls = _ops(7)
    v = random_state(5, 7).amplitudes
    a = dispersion_report(xs, Ls, v)
    b = dispersion_report(xs, Ls, np.outer(v, v.conj()))
    assert b.disp_x2 == pytest.approx(a.disp_x2, abs=1e-12)
    assert b.mean_L2 == pytest.approx(a.mean_L2, abs=1e-12)


def test_dispersion_errors():
    xs, Ls = _ops(1)
    with pytest.raises(DimensionError):
        dispersion_report(xs, Ls, np.ones(4))
    with pytest.raises(NumericsError):
        dispersion_report(xs, Ls, np.zeros(5))


def test_expect_and_variance():
    z = np.diag([1.0, -1.0]).astype(complex)
    plus = np.array([1.0, 1.0]) / math.sqrt(2)
    assert expect(z, plus) == pytest.approx(0.0)
    assert variance(z, plus) == pytest.approx(1.0)


def test_interlacing():
    assert interlaces([3.0, 1.0, -1.0], [2.0, 0.0])
    assert not interlaces([3.0, 1.0, -1.0], [2.0, 1.5])
    with pytest.raises(DimensionError):
        interlaces([1.0], [1.0])
