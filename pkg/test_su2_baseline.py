import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm

from numerics import commutator, random_density_matrix, random_state
from su2_baseline import (
    IDENTITY, TWO_PI, DirectSum, EulerAngles, block_rotation, build_irrep,
    madore_fs, madore_min_dispersion, madore_random_search, spin_coherent,
    theorem1_audit,
)


def _wigner_small_d(j: int, mp: int, m: int, beta: float) -> float:
    """<j,mp| exp(-i beta J_y) |j,m> by the explicit factorial sum."""
    f = math.factorial
    pre = math.sqrt(f(j + mp) * f(j - mp) * f(j + m) * f(j - m))
    c, s = math.cos(beta / 2), math.sin(beta / 2)
    total = 0.0
    for k in range(max(0, m - mp), min(j + m, j - mp) + 1):
        den = f(j + m - k) * f(k) * f(mp - m + k) * f(j - mp - k)
        total += ((-1) ** (mp - m + k) * c ** (2 * j + m - mp - 2 * k)
                  * s ** (mp - m + 2 * k) / den)
    return pre * total


# ---------------------------------------------------------------------------
# Irreps
# ---------------------------------------------------------------------------

def test_trivial_irrep():
    block = build_irrep(0)
    assert block.dim == 1
    for L in block.L:
        assert np.all(L == 0)


@pytest.mark.parametrize("l", range(0, 7))
def test_irrep_relations(l):
    b = build_irrep(l)
    L1, L2, L3 = b.L
    np.testing.assert_allclose(commutator(L1, L2), 1j * L3, atol=1e-12)
    np.testing.assert_allclose(commutator(L2, L3), 1j * L1, atol=1e-12)
    np.testing.assert_allclose(commutator(L3, L1), 1j * L2, atol=1e-12)
    cas = L1 @ L1 + L2 @ L2 + L3 @ L3
    np.testing.assert_allclose(cas, l * (l + 1) * np.eye(b.dim), atol=1e-12)


def test_spin_one_casimir_value():
    b = build_irrep(1)
    cas = sum(L @ L for L in b.L)
    np.testing.assert_allclose(np.diag(cas).real, [2.0, 2.0, 2.0], atol=1e-14)


def test_irrep_rejects_bad_spin():
    with pytest.raises(ValueError):
        build_irrep(-1)
    with pytest.raises(ValueError):
        build_irrep(1.5)


# ---------------------------------------------------------------------------
# Rotations
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("l", [1, 2, 4])
@pytest.mark.parametrize("theta", [0.0, 0.7, 2.2, math.pi])
def test_rotation_theta_matches_expm(l, theta):
    b = build_irrep(l)
    np.testing.assert_allclose(b.rotation_theta(theta), expm(1j * theta * b.L2), atol=1e-12)


@pytest.mark.parametrize("l", [1, 2, 3])
@pytest.mark.parametrize("theta", [0.3, 1.9])
def test_rotation_matches_wigner_formula(l, theta):
    R = build_irrep(l).rotation_theta(theta)
    for mp in range(-l, l + 1):
        for m in range(-l, l + 1):
            assert R[mp + l, m + l].real == pytest.approx(_wigner_small_d(l, mp, m, -theta), abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2 ** 31 - 1), l=st.integers(1, 4))
def test_block_rotation_unitary(seed, l):
    g = EulerAngles.random(np.random.default_rng(seed))
    D = block_rotation(build_irrep(l), g)
    np.testing.assert_allclose(D @ D.conj().T, np.eye(2 * l + 1), atol=1e-12)


def test_block_rotation_conjugates_generators():
    b = build_irrep(2)
    g = EulerAngles(0.4, 1.1, 2.5)
    D = block_rotation(b, g)
    # D L^2 D^H = L^2 while L3 is moved
    cas = sum(L @ L for L in b.L)
    np.testing.assert_allclose(D @ cas @ D.conj().T, cas, atol=1e-12)
    assert np.max(np.abs(D @ b.L3 @ D.conj().T - b.L3)) > 1e-3


def test_phi_only_rotation_is_diagonal():
    b = build_irrep(2)
    D = block_rotation(b, EulerAngles(phi=0.9))
    np.testing.assert_allclose(D, np.diag(np.exp(0.9j * np.arange(-2, 3))), atol=1e-14)


def test_euler_angle_ranges():
    with pytest.raises(ValueError):
        EulerAngles(phi=TWO_PI)
    with pytest.raises(ValueError):
        EulerAngles(theta=-0.1)
    with pytest.raises(ValueError):
        EulerAngles(psi=-1.0)
    g = EulerAngles.random(np.random.default_rng(3))
    assert 0.0 <= g.theta <= math.pi


# ---------------------------------------------------------------------------
# Spin coherent states
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("l", [1, 2, 5])
def test_spin_coherent_flip(l):
    v = spin_coherent(l, EulerAngles(0.0, math.pi, 0.0))
    assert abs(v.amplitudes[0]) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("l", [1, 3])
@pytest.mark.parametrize("seed", range(3))
def test_spin_coherent_angular_spread(l, seed):
    g = EulerAngles.random(np.random.default_rng(seed))
    v = spin_coherent(l, g).amplitudes
    b = build_irrep(l)
    mean = np.array([np.vdot(v, L @ v).real for L in b.L])
    spread = l * (l + 1) - float(mean @ mean)
    assert spread == pytest.approx(l, abs=1e-10)
    assert theorem1_audit(b, v) == pytest.approx(0.0, abs=1e-10)


def test_identity_gives_highest_weight():
    v = spin_coherent(2, IDENTITY)
    np.testing.assert_allclose(np.abs(v.amplitudes), [0, 0, 0, 0, 1], atol=1e-14)


# ---------------------------------------------------------------------------
# Direct sums
# ---------------------------------------------------------------------------

def test_direct_sum_indexing():
    ds = DirectSum.up_to(2)
    assert ds.dim == 9
    assert ds.index(0, 0) == 0
    assert ds.index(2, -2) == 4
    with pytest.raises(ValueError):
        ds.index(1, 2)
    with pytest.raises(KeyError):
        ds.index(5, 0)
    with pytest.raises(ValueError):
        DirectSum([])


@pytest.mark.parametrize("seed", range(20))
def test_angular_slack_non_negative(seed):
    ds = DirectSum.up_to(3)
    assert theorem1_audit(ds, random_state(ds.dim, seed)) >= -1e-12
    assert theorem1_audit(ds, random_density_matrix(ds.dim, seed)) >= -1e-12


@pytest.mark.slow
def test_angular_slack_large_sample():
    ds = DirectSum.up_to(4)
    rng = np.random.default_rng(2024)
    worst = min(theorem1_audit(ds, random_state(ds.dim, rng)) for _ in range(10000))
    assert worst >= -1e-11
    worst_mixed = min(theorem1_audit(ds, random_density_matrix(ds.dim, rng, 1 + i % 4))
                      for i in range(1000))
    assert worst_mixed >= -1e-11


@pytest.mark.slow
@pytest.mark.parametrize("l", range(0, 9))
def test_spin_coherent_saturates_for_every_rotation(l):
    rng = np.random.default_rng(l)
    block = build_irrep(l)
    for _ in range(100):
        assert theorem1_audit(block, spin_coherent(l, EulerAngles.random(rng))) == pytest.approx(0.0, abs=1e-10)


def test_mixture_slack_strictly_positive():
    ds = DirectSum.up_to(2)
    rho = np.zeros((ds.dim, ds.dim), dtype=complex)
    rho[ds.index(1, 1), ds.index(1, 1)] = 0.5
    rho[ds.index(2, 2), ds.index(2, 2)] = 0.5
    slack = theorem1_audit(ds, rho)
    assert slack > 1e-9
    assert slack == pytest.approx(0.25, abs=1e-12)


# ---------------------------------------------------------------------------
# Madore fuzzy sphere
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("l", [1, 2, 5])
def test_madore_algebra(l):
    fs = madore_fs(l)
    x1, x2, x3 = fs.x
    np.testing.assert_allclose(commutator(x1, x2), 1j * fs.commutator_scale * x3, atol=1e-12)
    np.testing.assert_allclose(x1 @ x1 + x2 @ x2 + x3 @ x3, np.eye(fs.n), atol=1e-12)


@pytest.mark.parametrize("l", range(1, 8))
def test_madore_min_dispersion(l):
    assert madore_min_dispersion(l) == pytest.approx(1.0 / (l + 1), abs=1e-12)


def test_madore_random_search_respects_minimum():
    assert madore_random_search(3, 200, 7) >= 0.25 - 1e-9


def test_madore_rejects_trivial_irrep():
    with pytest.raises(ValueError):
        madore_fs(0)
