import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm
from scipy.special import eval_jacobi, hyp2f1

from numerics import hermitian_eigen, make_rule
from specfun import (
    JacobiParams, OrderingError, PochhammerPoleError, factorial_ratio,
    hyp2f1_terminating, jacobi_norm, jacobi_poly, pochhammer,
    product_formula_f, product_formula_f_closed, product_formula_g,
    rotation_element_closed_form, summation_suite, toeplitz_closed_form,
)
from su2_baseline import build_irrep


def test_pochhammer():
    assert pochhammer(3, 0) == 1
    assert pochhammer(3, 4) == 3 * 4 * 5 * 6
    assert pochhammer(Fraction(1, 2), 2) == Fraction(3, 4)
    with pytest.raises(ValueError):
        pochhammer(1, -1)


def test_factorial_ratio():
    assert factorial_ratio(7, 4) == 210
    assert factorial_ratio(4, 7) == Fraction(1, 210)
    assert factorial_ratio(5, 5) == 1
    with pytest.raises(ValueError):
        factorial_ratio(-1, 2)


# ---------------------------------------------------------------------------
# Hypergeometric series
# ---------------------------------------------------------------------------

def test_hyp2f1_small_case():
    assert hyp2f1_terminating(2, 3.0, 1.0, 0.5) == pytest.approx(-0.5, abs=1e-15)
    assert hyp2f1_terminating(0, 3.0, 1.0, 0.5) == 1.0


@pytest.mark.parametrize("n", [1, 3, 6, 10])
@pytest.mark.parametrize("b,c,z", [(0.5, 1.5, 0.3), (2.0, 3.0, -0.7), (-1.5, 2.5, 0.9)])
def test_hyp2f1_against_scipy(n, b, c, z):
    assert hyp2f1_terminating(n, b, c, z) == pytest.approx(hyp2f1(-n, b, c, z), rel=1e-11, abs=1e-13)


@settings(max_examples=50, deadline=None)
@given(n=st.integers(0, 12), c=st.floats(0.5, 4.0), p=st.integers(1, 4), z=st.floats(-0.9, 0.45))
def test_hyp2f1_euler_transform(n, c, p, z):
    # F(-n, b; c; z) = (1 - z)^n F(-n, c - b; c; z/(z - 1)) with b = c + p
    b = c + p
    lhs = hyp2f1_terminating(n, b, c, z)
    rhs = (1.0 - z) ** n * hyp2f1_terminating(n, c - b, c, z / (z - 1.0))
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-10)


def test_hyp2f1_pole():
    with pytest.raises(PochhammerPoleError) as e:
        hyp2f1_terminating(4, 1.0, -1.0, 0.5)
    assert e.value.m == 2
    with pytest.raises(ValueError):
        hyp2f1_terminating(-1, 1.0, 1.0, 0.5)


# ---------------------------------------------------------------------------
# Jacobi polynomials
# ---------------------------------------------------------------------------

@settings(max_examples=80, deadline=None)
@given(n=st.integers(0, 15), a=st.integers(0, 6), b=st.integers(0, 6), x=st.floats(-1.0, 1.0))
def test_jacobi_against_scipy(n, a, b, x):
    expected = eval_jacobi(n, a, b, x)
    assert jacobi_poly(JacobiParams(n, a, b, x)) == pytest.approx(expected, rel=1e-10, abs=1e-10)


def test_jacobi_params_validation():
    with pytest.raises(ValueError):
        JacobiParams(2, -1, 0, 0.0)
    with pytest.raises(ValueError):
        JacobiParams(2, 0, 0, 1.5)


@pytest.mark.parametrize("n,a,b", [(0, 0, 0), (3, 0, 0), (4, 2, 1), (5, 3, 4)])
def test_jacobi_norm_by_quadrature(n, a, b):
    rule = make_rule("gauss_legendre", n + (a + b) // 2 + 2)
    x = rule.nodes
    vals = np.array([jacobi_poly(JacobiParams(n, a, b, float(t))) for t in x])
    integral = rule.integrate((1 - x) ** a * (1 + x) ** b * vals ** 2)
    assert integral == pytest.approx(jacobi_norm(n, a, b), rel=1e-12)


# ---------------------------------------------------------------------------
# Product formulas and rotation elements
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("l", range(0, 9))
def test_product_formulas(l):
    for h in range(-l, l + 1):
        for s in range(h, l + 1):
            closed = product_formula_f_closed(l, h, s)
            assert product_formula_f(l, h, s) == closed
            assert product_formula_g(l, h, s) == closed


def test_product_formula_ordering():
    with pytest.raises(OrderingError):
        product_formula_f(3, 2, 1)
    with pytest.raises(OrderingError):
        product_formula_g(3, -4, 0)


@pytest.mark.parametrize("l", [1, 2, 3, 5])
@pytest.mark.parametrize("theta", [0.0, 0.4, 1.3, 2.9])
def test_rotation_element_matches_exponential(l, theta):
    block = build_irrep(l)
    R = expm(1j * theta * block.L2)
    for n in range(0, l + 1):
        for h in range(n, l + 1):
            assert rotation_element_closed_form(l, n, h, theta) == pytest.approx(
                R[n + l, h + l].real, abs=1e-12)
            assert abs(R[n + l, h + l].imag) < 1e-12


def test_rotation_element_small_cases():
    theta = 0.8
    assert rotation_element_closed_form(1, 0, 1, theta) == pytest.approx(-math.sin(theta) / math.sqrt(2))
    assert rotation_element_closed_form(1, 0, 0, theta) == pytest.approx(math.cos(theta))
    with pytest.raises(OrderingError):
        rotation_element_closed_form(2, 2, 1, theta)


# ---------------------------------------------------------------------------
# Toeplitz spectra
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("n", [1, 2, 5, 9])
def test_toeplitz_symmetric(n):
    rep = toeplitz_closed_form(n, 0.3, 0.5, 0.5)
    dense = 0.3 * np.eye(n) + 0.5 * (np.eye(n, k=1) + np.eye(n, k=-1))
    np.testing.assert_allclose(rep.eigenvalues, hermitian_eigen(dense).eigenvalues, atol=1e-12)
    assert rep.residual < 1e-12
    assert rep.property_flags["norm_identity"]
    assert not rep.property_flags["complex_spectrum"]


def test_toeplitz_four_values():
    rep = toeplitz_closed_form(4, 2.0, 1.0, 1.0)
    np.testing.assert_allclose(rep.eigenvalues, [3.6180, 2.6180, 1.3820, 0.3820], atol=1e-4)


def test_toeplitz_nonsymmetric_real():
    rep = toeplitz_closed_form(6, 1.0, 2.0, 0.5)
    assert rep.residual < 1e-10
    np.testing.assert_allclose(rep.eigenvalues, 1.0 + 2.0 * np.cos(np.arange(1, 7) * np.pi / 7), atol=1e-12)
    assert "norm_identity" not in rep.property_flags


def test_toeplitz_complex_spectrum():
    rep = toeplitz_closed_form(5, 0.0, 1.0, -1.0)
    assert rep.property_flags["complex_spectrum"]
    assert rep.residual < 1e-10


def test_toeplitz_rejects_zero_coupling():
    with pytest.raises(ValueError):
        toeplitz_closed_form(3, 1.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        toeplitz_closed_form(0, 1.0, 1.0, 1.0)


# ---------------------------------------------------------------------------
# Summation identities
# ---------------------------------------------------------------------------

def test_summation_suite():
    out = summation_suite(50)
    exact = [name for name in out if name.startswith(("rising", "sum_h"))]
    assert len(exact) == 10
    for name in exact:
        assert out[name] == 0, name
    for name, value in out.items():
        assert value <= 1e-12, name


def test_summation_suite_argument_checks():
    with pytest.raises(ValueError):
        summation_suite(1)
    with pytest.raises(ValueError):
        summation_suite(3, theta_samples=1)
