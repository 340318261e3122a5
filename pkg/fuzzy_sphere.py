#!/usr/bin/env -S python3 -u
"""
The fuzzy sphere S^2_L.

The Hilbert space is the direct sum of the spin-l irreps, l = 0..L, with
basis psi_l^m at index l^2 + m + l. The coordinates connect neighbouring
irreps with weights c_l = sqrt(1 + l^2/k):

    x_a psi_l^m = c_l A_l^{a,m} psi_{l-1}^{m+a} + c_{l+1} B_l^{a,m} psi_{l+1}^{m+a}

for a in {+, 0, -}, with c_0 = c_{L+1} = 0.

Contains:
- FuzzySphereSpace / build_sphere and the Clebsch tables
- verify_sphere_algebra, sphere_so4_check
- wigner_rotation, theorem2_audit
- sphere_resolution_check (full group or coset), projector_check
- the coherent-state families omega (on psi_l^l) and phi (on psi_l^0)
- sphere_ur_audit
- the x0 blocks B_m, the chi-tilde estimate and the Madore comparison
- jacobi_lemma_check and gauss_decomposition_check
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import permutations
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from config import KPolicy, KPolicyLike, env_flag, resolve_k
from numerics import (
    BasisKind, BasisTag, DispersionReport, ResidualSuite, ResolutionReport,
    SpectrumReport, StateLike, StateVector, UncertaintyAudit, commutator,
    dispersion_report, expect, hermiticity_residual, make_rule, max_abs,
    sym_tridiag_eigen, variance,
)
from specfun import factorial_ratio
from su2_baseline import (
    IDENTITY, EulerAngles, IrrepBlock, angular_slack, block_rotation,
    build_irrep, madore_min_dispersion,
)

__all__ = [
    "EulerAngles", "FuzzySphereSpace", "build_sphere", "clebsch_A", "clebsch_B",
    "verify_sphere_algebra", "sphere_so4_check", "wigner_rotation", "theorem2_audit",
    "sphere_resolution_check", "projector_check", "ScsFamily", "sphere_scs_family",
    "sphere_scs_closed_forms", "sphere_ur_audit", "sphere_Bm_analysis", "sphere_Bm_chain",
    "alpha1_monotone", "sphere_chi_tilde", "jacobi_lemma_check",
    "jacobi_lemma_sign_patterns", "gauss_decomposition_check", "madore_comparison",
]

_DEBUG = env_flag("FUZZY_DEBUG_SPHERE")


def _dbg(msg: str) -> None:
    if _DEBUG:
        print(f"[sphere] {msg}", flush=True)


# ---------------------------------------------------------------------------
# Clebsch tables
# ---------------------------------------------------------------------------

def clebsch_A(l: int, a: int, m: int) -> float:
    """A_l^{a,m}: weight of psi_{l-1}^{m+a} in x_a psi_l^m (before c_l)."""
    if l < 1 or abs(m) > l or abs(m + a) > l - 1:
        return 0.0
    den = (2 * l + 1) * (2 * l - 1)
    if a == 0:
        return math.sqrt((l + m) * (l - m) / den)
    if a == 1:
        return math.sqrt((l - m) * (l - m - 1) / den)
    if a == -1:
        return -math.sqrt((l + m) * (l + m - 1) / den)
    raise ValueError(f"a must be -1, 0 or 1, got {a!r}")


def clebsch_B(l: int, a: int, m: int) -> float:
    """B_l^{a,m} = A_{l+1}^{-a,m+a}: weight of psi_{l+1}^{m+a}."""
    return clebsch_A(l + 1, -a, m + a)


def sphere_c(lam: int, k: float) -> np.ndarray:
    """c_l for l = 0..lam+1; zero at both ends."""
    out = np.zeros(lam + 2)
    for l in range(1, lam + 1):
        out[l] = math.sqrt(1.0 + l * l / k)
    return out


# ---------------------------------------------------------------------------
# Space
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FuzzySphereSpace:
    lam: int
    k: float
    c: np.ndarray                  # c[l], l = 0..lam+1
    blocks: Tuple[IrrepBlock, ...]
    Lp: np.ndarray
    Lm: np.ndarray
    L: Tuple[np.ndarray, np.ndarray, np.ndarray]
    xp: np.ndarray
    xm: np.ndarray
    x: Tuple[np.ndarray, np.ndarray, np.ndarray]
    x_sq: np.ndarray
    L_sq: np.ndarray
    proj: Tuple[np.ndarray, ...]   # P~_l on the spin-l block
    k_policy: KPolicyLike = KPolicy.MIN_KINEQ
    k_value: Optional[float] = None

    @property
    def dim(self) -> int:
        return (self.lam + 1) ** 2

    @property
    def basis(self) -> BasisTag:
        return BasisTag(BasisKind.SPHERE, self.lam)

    @property
    def x0(self) -> np.ndarray:
        return self.x[2]

    @property
    def K(self) -> float:
        """(1 + (L+1)^2/k) / (2L+1)."""
        return (1.0 + (self.lam + 1) ** 2 / self.k) / (2 * self.lam + 1)

    @property
    def l_values(self) -> np.ndarray:
        return np.concatenate([np.full(2 * l + 1, l) for l in range(self.lam + 1)])

    @property
    def m_values(self) -> np.ndarray:
        return np.concatenate([np.arange(-l, l + 1) for l in range(self.lam + 1)])

    @staticmethod
    def index(l: int, m: int) -> int:
        return l * l + m + l

    def basis_state(self, l: int, m: int) -> StateVector:
        if not 0 <= l <= self.lam or abs(m) > l:
            raise ValueError(f"no basis vector psi_{l}^{m} for cutoff {self.lam}")
        amp = np.zeros(self.dim, dtype=complex)
        amp[self.index(l, m)] = 1.0
        return StateVector(amp, self.basis)

    def L_prime(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """L'_k = (I/k - K P~_L) L_k, so that [x_i, x_j] = -i eps_ijk L'_k."""
        w = np.eye(self.dim) / self.k - self.K * self.proj[-1]
        return tuple(w @ Lk for Lk in self.L)

    def __repr__(self) -> str:
        return f"FuzzySphereSpace(lam={self.lam}, k={self.k})"


def _embed(blocks: Sequence[np.ndarray], dim: int) -> np.ndarray:
    out = np.zeros((dim, dim), dtype=complex)
    off = 0
    for b in blocks:
        n = b.shape[0]
        out[off:off + n, off:off + n] = b
        off += n
    return out


def build_sphere(lam: int, k_policy: KPolicyLike = KPolicy.MIN_KINEQ,
                 k_value: Optional[float] = None) -> FuzzySphereSpace:
    k = resolve_k(k_policy, lam, k_value)
    lam = int(lam)
    dim = (lam + 1) ** 2
    c = sphere_c(lam, k)
    idx = FuzzySphereSpace.index

    blocks = tuple(build_irrep(l) for l in range(lam + 1))
    Lp = _embed([b.Lp for b in blocks], dim)
    Lm = _embed([b.Lm for b in blocks], dim)
    L3 = _embed([b.L3 for b in blocks], dim)
    L = (0.5 * (Lp + Lm), (Lp - Lm) / 2j, L3)

    xa = {a: np.zeros((dim, dim), dtype=complex) for a in (-1, 0, 1)}
    for l in range(lam + 1):
        for m in range(-l, l + 1):
            col = idx(l, m)
            for a, op in xa.items():
                if l >= 1 and abs(m + a) <= l - 1:
                    op[idx(l - 1, m + a), col] = c[l] * clebsch_A(l, a, m)
                if l < lam:
                    op[idx(l + 1, m + a), col] = c[l + 1] * clebsch_B(l, a, m)
    xp, x0, xm = xa[1], xa[0], xa[-1]
    x = (0.5 * (xp + xm), (xp - xm) / 2j, x0)

    proj = []
    off = 0
    for l in range(lam + 1):
        P = np.zeros((dim, dim), dtype=complex)
        P[off:off + 2 * l + 1, off:off + 2 * l + 1] = np.eye(2 * l + 1)
        proj.append(P)
        off += 2 * l + 1

    _dbg(f"built lam={lam} k={k} dim={dim}")
    return FuzzySphereSpace(
        lam, k, c, blocks, Lp, Lm, L, xp, xm, x,
        sum(xi @ xi for xi in x), sum(Li @ Li for Li in L), tuple(proj),
        k_policy, k_value,
    )


# ---------------------------------------------------------------------------
# Algebra
# ---------------------------------------------------------------------------

_CYCLIC = ((0, 1, 2), (1, 2, 0), (2, 0, 1))


def sphere_x_sq_table(space: FuzzySphereSpace) -> np.ndarray:
    """
    Eigenvalue of x^2 on each basis vector: 1 + (l(l+1)+1)/k for l < L and
    L(1 + L^2/k)/(2L+1) on the top block.
    """
    lam, k = space.lam, space.k
    l = space.l_values.astype(float)
    out = 1.0 + (l * (l + 1) + 1.0) / k
    out[l == lam] = lam * (1.0 + lam * lam / k) / (2 * lam + 1)
    return out


def verify_sphere_algebra(space: FuzzySphereSpace, tol: Optional[float] = None) -> ResidualSuite:
    """Residuals of the defining relations of S^2_L."""
    tol = 1e-11 * (space.lam + 1) if tol is None else tol
    lam, dim, k = space.lam, space.dim, space.k
    eye = np.eye(dim)
    L, x = space.L, space.x
    P_top = space.proj[-1]
    Lprime = space.L_prime()

    rot_Lx = rot_LL = rot_xx = 0.0
    for i, j, kk in _CYCLIC:
        for (p, q, sgn) in ((i, j, 1.0), (j, i, -1.0)):
            rot_Lx = max(rot_Lx, max_abs(commutator(L[p], x[q]) - sgn * 1j * x[kk]))
            rot_LL = max(rot_LL, max_abs(commutator(L[p], L[q]) - sgn * 1j * L[kk]))
            rot_xx = max(rot_xx, max_abs(commutator(x[p], x[q]) + sgn * 1j * Lprime[kk]))
        for p in range(3):
            rot_Lx = max(rot_Lx, max_abs(commutator(L[p], x[p])))

    casimir = sum(l * (l + 1) * P for l, P in enumerate(space.proj))
    x_sq_expected = (eye + (space.L_sq + eye) / k
                     - (1.0 + (lam + 1) ** 2 / k) * ((lam + 1) / (2 * lam + 1)) * P_top)

    res = {
        "hermitian": max(max(hermiticity_residual(op) for op in x + L),
                         max_abs(space.xp.conj().T - space.xm)),
        "L_x": rot_Lx,
        "L_L": rot_LL,
        "x_dot_L": max_abs(sum(xi @ Li for xi, Li in zip(x, L))),
        "x_x": rot_xx,
        "x_squared": max_abs(space.x_sq - x_sq_expected),
        # the minimal polynomial of L^2 splits over the block projectors
        "L_minimal_polynomial": max(max_abs(space.L_sq - casimir),
                                    max_abs(sum(space.proj) - eye)),
        "xplus_nilpotent": max_abs(np.linalg.matrix_power(space.xp, 2 * lam + 1)),
        "xminus_nilpotent": max_abs(np.linalg.matrix_power(space.xm, 2 * lam + 1)),
        "x0_L0": max_abs(commutator(space.x0, L[2])),
        "x_squared_spectrum": max(max_abs(space.x_sq - np.diag(np.diag(space.x_sq))),
                                  float(np.max(np.abs(np.real(np.diag(space.x_sq))
                                                      - sphere_x_sq_table(space))))),
    }
    return ResidualSuite(res, tol)


# ---------------------------------------------------------------------------
# so(4)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class So4Report:
    """
    Brackets and Casimirs of the so(4) generators built from x and L.

    casimir_pairs is sum over lambda < mu of L_{lambda mu}^2 (expected L(L+2));
    casimir_full is the double sum, twice that.
    """
    bracket_residual: float
    casimir_pairs: float
    casimir_full: float
    casimir_spread: float
    pseudo_casimir: float
    g0_squared: float
    expected_casimir: float

    @property
    def passed(self) -> bool:
        tol = 1e-10 * max(1.0, self.expected_casimir)
        return (self.bracket_residual <= tol and self.casimir_spread <= tol
                and self.pseudo_casimir <= tol
                and abs(self.casimir_pairs - self.expected_casimir) <= tol)


def so4_g_squared(lam: int, k: float, l: int) -> float:
    """g(l)^2 for the rescaling L_{4i} = g^{-1} x_i g^{-1}."""
    num = math.prod(lam + l - 2 * h for h in range(l))
    den = math.prod(lam + l + 1 - 2 * h for h in range(l + 1))
    corr = 1.0
    for j in range((l + 1) // 2):
        corr *= (1.0 + (l - 2 * j) ** 2 / k) / (1.0 + (l - 1 - 2 * j) ** 2 / k)
    return num / den * corr


def _levi_civita4(p: Tuple[int, ...]) -> int:
    sign = 1
    p = list(p)
    for i in range(4):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


def sphere_so4_check(space: FuzzySphereSpace) -> So4Report:
    lam, dim = space.lam, space.dim
    g_inv = np.concatenate([np.full(2 * l + 1, 1.0 / math.sqrt(so4_g_squared(lam, space.k, l)))
                            for l in range(lam + 1)])

    gen = [[np.zeros((dim, dim), dtype=complex) for _ in range(4)] for _ in range(4)]
    for i, j, kk in _CYCLIC:
        gen[i][j] = space.L[kk]
        gen[j][i] = -space.L[kk]
    for i in range(3):
        L4i = g_inv[:, None] * space.x[i] * g_inv[None, :]
        gen[3][i] = L4i
        gen[i][3] = -L4i

    def delta(a: int, b: int) -> float:
        return 1.0 if a == b else 0.0

    bracket = 0.0
    for lm in range(4):
        for mu in range(lm + 1, 4):
            for nu in range(4):
                for rho in range(nu + 1, 4):
                    rhs = 1j * (delta(lm, nu) * gen[mu][rho] - delta(lm, rho) * gen[mu][nu]
                                - delta(mu, nu) * gen[lm][rho] + delta(mu, rho) * gen[lm][nu])
                    bracket = max(bracket, max_abs(commutator(gen[lm][mu], gen[nu][rho]) - rhs))

    pairs = sum(gen[a][b] @ gen[a][b] for a in range(4) for b in range(a + 1, 4))
    full = sum(gen[a][b] @ gen[a][b] for a in range(4) for b in range(4))
    const = float(np.real(np.trace(pairs))) / dim
    pseudo = sum(_levi_civita4(p) * gen[p[0]][p[1]] @ gen[p[2]][p[3]] for p in permutations(range(4)))

    rep = So4Report(
        bracket_residual=bracket,
        casimir_pairs=const,
        casimir_full=float(np.real(np.trace(full))) / dim,
        casimir_spread=max_abs(pairs - const * np.eye(dim)),
        pseudo_casimir=max_abs(pseudo),
        g0_squared=so4_g_squared(lam, space.k, 0),
        expected_casimir=float(lam * (lam + 2)),
    )
    _dbg(f"so4 lam={lam} bracket={bracket:.3e} casimir={const!r}")
    return rep


# ---------------------------------------------------------------------------
# Rotations
# ---------------------------------------------------------------------------

def wigner_rotation(space: FuzzySphereSpace, g: EulerAngles) -> np.ndarray:
    """Block-diagonal e^{i phi L3} e^{i theta L2} e^{i psi L3}."""
    return _embed([block_rotation(b, g) for b in space.blocks], space.dim)


def _rotation_theta(space: FuzzySphereSpace, theta: float) -> np.ndarray:
    return _embed([b.rotation_theta(theta) for b in space.blocks], space.dim)


def theorem2_audit(space: FuzzySphereSpace, state: StateLike) -> float:
    """<L^2> - |<L>| (|<L>| + 1) on a pure or mixed state; never negative."""
    return angular_slack(space.L, state)


def sphere_dispersion(space: FuzzySphereSpace, state: StateLike) -> DispersionReport:
    return dispersion_report(space.x, space.L, state)


# ---------------------------------------------------------------------------
# Coherent states
# ---------------------------------------------------------------------------

class ScsFamily(Enum):
    OMEGA_LL = "omega_ll"
    PHI_L0 = "phi_l0"


def _scs_amplitudes(space: FuzzySphereSpace, family: ScsFamily,
                    beta: Optional[Sequence[float]]) -> np.ndarray:
    lam = space.lam
    beta = np.zeros(lam + 1) if beta is None else np.asarray(beta, dtype=float)
    if beta.shape != (lam + 1,):
        raise ValueError(f"beta needs {lam + 1} phases, got {beta.shape}")
    amp = np.zeros(space.dim, dtype=complex)
    for l in range(lam + 1):
        m = l if family is ScsFamily.OMEGA_LL else 0
        amp[space.index(l, m)] = np.exp(1j * beta[l]) * math.sqrt(2 * l + 1) / (lam + 1)
    return amp


def sphere_scs_family(space: FuzzySphereSpace, family=ScsFamily.OMEGA_LL,
                      beta: Optional[Sequence[float]] = None,
                      g: EulerAngles = IDENTITY) -> Tuple[StateVector, DispersionReport]:
    """
    D(g) omega^beta or D(g) phi^beta, where omega^beta puts
    e^{i beta_l} sqrt(2l+1)/(L+1) on psi_l^l and phi^beta the same on psi_l^0.
    """
    family = ScsFamily(family)
    amp = _scs_amplitudes(space, family, beta)
    if g != IDENTITY:
        amp = wigner_rotation(space, g) @ amp
    state = StateVector.normalized(amp, space.basis)
    return state, sphere_dispersion(space, state)


def sphere_scs_closed_forms(space: FuzzySphereSpace, family=ScsFamily.OMEGA_LL,
                            beta: Optional[Sequence[float]] = None) -> Dict[str, complex]:
    """Closed-form moments of the unrotated family members."""
    family = ScsFamily(family)
    lam, k, c = space.lam, space.k, space.c
    beta = np.zeros(lam + 1) if beta is None else np.asarray(beta, dtype=float)
    n2 = (lam + 1) ** 2
    out: Dict[str, complex] = {"mean_x_sq": lam / (lam + 1) + lam * lam / (2.0 * k)}
    if family is ScsFamily.OMEGA_LL:
        out["mean_xplus"] = -sum(np.exp(1j * (beta[l - 1] - beta[l])) * c[l] * math.sqrt(2 * l * (2 * l - 1))
                                 for l in range(1, lam + 1)) / n2
        out["mean_x0"] = 0.0
        out["disp_L2"] = lam * (2 * lam ** 3 + 32 * lam ** 2 + 65 * lam + 36) / (36.0 * (lam + 1) ** 2)
    else:
        out["mean_xplus"] = 0j
        out["mean_x0"] = sum(2 * l * c[l] * math.cos(beta[l - 1] - beta[l])
                             for l in range(1, lam + 1)) / n2
        out["disp_L2"] = lam * (lam + 2) / 2.0
    return out


def sphere_scs_bound(lam: int, family=ScsFamily.OMEGA_LL) -> float:
    """3/(L+1) for omega^0, 1/(L+1) for phi^0."""
    return (3.0 if ScsFamily(family) is ScsFamily.OMEGA_LL else 1.0) / (lam + 1)


# ---------------------------------------------------------------------------
# Resolution of the identity
# ---------------------------------------------------------------------------

def _phase_matrix(m: np.ndarray, count: int) -> np.ndarray:
    """sum_j w_j e^{i a_j (m_a - m_b)} over a periodic rule."""
    rule = make_rule("periodic_trapezoid", count)
    diff = m[:, None] - m[None, :]
    out = np.zeros(diff.shape, dtype=complex)
    for a, w in zip(rule.nodes, rule.weights):
        out += w * np.exp(1j * a * diff)
    return out


def sphere_resolution_check(space: FuzzySphereSpace, omega: Optional[StateVector] = None,
                            nodes_phi: Optional[int] = None, nodes_theta: Optional[int] = None,
                            nodes_psi: Optional[int] = None, coset: bool = False) -> ResolutionReport:
    """
    B = ((L+1)^2 / 8 pi^2) sum w P_g over periodic(phi) x Gauss-Legendre(cos theta)
    x periodic(psi), with P_g the projector on D(g) omega. The coset form
    drops the psi integral, needs omega on L3 = 0 and uses (L+1)^2 / 4 pi.
    Defaults: 2L+2 nodes per angle, omega^0 (phi^0 for the coset).
    """
    lam, dim = space.lam, space.dim
    M_phi = 2 * lam + 2 if nodes_phi is None else int(nodes_phi)
    N_theta = 2 * lam + 2 if nodes_theta is None else int(nodes_theta)
    M_psi = 2 * lam + 2 if nodes_psi is None else int(nodes_psi)

    if omega is None:
        family = ScsFamily.PHI_L0 if coset else ScsFamily.OMEGA_LL
        w_vec = _scs_amplitudes(space, family, None)
    else:
        w_vec = np.asarray(omega.amplitudes if isinstance(omega, StateVector) else omega, dtype=complex)
    if w_vec.size != dim:
        raise ValueError(f"fiducial state has dimension {w_vec.size}, expected {dim}")
    m = space.m_values
    if coset and np.max(np.abs(w_vec[m != 0]), initial=0.0) > 1e-14:
        raise ValueError("the coset resolution needs a fiducial state with L3 = 0")

    inner = np.outer(w_vec, w_vec.conj())
    if not coset:
        inner = inner * _phase_matrix(m, M_psi)
    rule = make_rule("gauss_legendre", N_theta)
    Q = np.zeros((dim, dim), dtype=complex)
    for u, w in zip(rule.nodes, rule.weights):
        R = _rotation_theta(space, math.acos(max(-1.0, min(1.0, u))))
        Q += w * (R @ inner @ R.conj().T)
    raw = Q * _phase_matrix(m, M_phi)

    volume = 4.0 * math.pi if coset else 8.0 * math.pi ** 2
    B = dim / volume * raw
    l_vals = space.l_values
    profile = np.array([dim * float(np.sum(np.abs(w_vec[l_vals == l]) ** 2)) / (2 * l + 1)
                        for l in range(lam + 1)])
    under = M_phi < 2 * lam + 1 or N_theta < 2 * lam + 2 or (not coset and M_psi < 2 * lam + 1)
    rep = ResolutionReport(
        residual=max_abs(B - np.eye(dim)),
        measured_constant=float(np.real(np.trace(raw))) / dim,
        expected_constant=volume / dim,
        profile=profile,
        norm_condition=bool(np.max(np.abs(profile - 1.0)) <= 1e-12),
        nodes=(M_phi, N_theta) if coset else (M_phi, N_theta, M_psi),
        under_resolved=under,
    )
    _dbg(f"resolution lam={lam} coset={coset} nodes={rep.nodes} residual={rep.residual:.3e}")
    return rep


def projector_check(space: FuzzySphereSpace, h: int, nodes: Optional[int] = None) -> float:
    """max |(1/2pi) sum_j w_j e^{i a_j (L3 - h)} - P^h| on 2L+1 nodes by default."""
    if abs(h) > space.lam:
        raise ValueError(f"|h| must not exceed {space.lam}, got {h}")
    M = 2 * space.lam + 1 if nodes is None else int(nodes)
    rule = make_rule("periodic_trapezoid", M)
    shift = space.m_values - h
    diag = sum(w * np.exp(1j * a * shift) for a, w in zip(rule.nodes, rule.weights)) / (2.0 * math.pi)
    return float(np.max(np.abs(diag - (shift == 0))))


# ---------------------------------------------------------------------------
# Uncertainty relations
# ---------------------------------------------------------------------------

def sphere_ur_audit(space: FuzzySphereSpace, state: StateLike) -> UncertaintyAudit:
    """
    Slacks of
      lur_ij:  (DL_i)^2 (DL_j)^2 >= <L_k>^2 / 4
      hur_ij:  (DL_i)^2 (Dx_j)^2 >= <x_k>^2 / 4            (i != j)
      rs_ij:   4 (Dx_i)^2 (Dx_j)^2 >= <L'_k>^2 + cov_ij^2
      disp_x_quartic: (Dx)^4 >= (3/4) |<L'>|^2
    with (i, j, k) cyclic where a sign matters only through the square.
    """
    L, x = space.L, space.x
    Lp = space.L_prime()
    dL = [variance(op, state) for op in L]
    dx = [variance(op, state) for op in x]
    mL = [expect(op, state).real for op in L]
    mx = [expect(op, state).real for op in x]
    mLp = [expect(op, state).real for op in Lp]

    slacks: Dict[str, float] = {}
    rhs: Dict[str, float] = {}
    for i, j, kk in _CYCLIC:
        name = f"lur_{i + 1}{j + 1}"
        rhs[name] = 0.25 * mL[kk] ** 2
        slacks[name] = dL[i] * dL[j] - rhs[name]

    for i in range(3):
        for j in range(3):
            if i == j:
                continue
            kk = 3 - i - j
            name = f"hur_{i + 1}{j + 1}"
            rhs[name] = 0.25 * mx[kk] ** 2
            slacks[name] = dL[i] * dx[j] - rhs[name]

    for i, j, kk in _CYCLIC:
        name = f"rs_{i + 1}{j + 1}"
        cov = expect(x[i] @ x[j] + x[j] @ x[i], state).real - 2.0 * mx[i] * mx[j]
        rhs[name] = mLp[kk] ** 2 + cov * cov
        slacks[name] = 4.0 * dx[i] * dx[j] - rhs[name]

    disp_x = sum(dx)
    rhs["disp_x_quartic"] = 0.75 * sum(v * v for v in mLp)
    slacks["disp_x_quartic"] = disp_x * disp_x - rhs["disp_x_quartic"]
    return UncertaintyAudit(slacks, rhs)


# ---------------------------------------------------------------------------
# x0 blocks B_m and the chi-tilde estimate
# ---------------------------------------------------------------------------

def bm_offdiag(lam: int, k: float, m: int) -> np.ndarray:
    """c_l sqrt((l^2 - m^2) / ((2l+1)(2l-1))) for l = |m|+1..L."""
    m = abs(int(m))
    if m > lam:
        raise ValueError(f"|m| must not exceed {lam}, got {m}")
    return np.array([math.sqrt(1.0 + l * l / k) * math.sqrt((l * l - m * m) / ((2 * l + 1) * (2 * l - 1)))
                     for l in range(m + 1, lam + 1)])


def bm_spectrum(lam: int, k: float, m: int) -> SpectrumReport:
    off = bm_offdiag(lam, k, m)
    return sym_tridiag_eigen(np.zeros(off.size + 1), off)


def sphere_Bm_analysis(space: FuzzySphereSpace, m: int) -> SpectrumReport:
    """Spectrum of x0 restricted to L3 = m; the top eigenvalue is alpha_1(L; m)."""
    return bm_spectrum(space.lam, space.k, m)


@dataclass(frozen=True)
class BmChain:
    alphas: Tuple[float, ...]          # alpha_1(L; m), m = 0..L
    decreasing: bool
    above_cos: bool                    # alpha_1(L; 0) > cos(pi/(L+2))
    max_gap: float                     # largest gap in the B_0 spectrum
    gap_bound: float
    min_a: float                       # smallest a_l = c_l l / sqrt(4l^2 - 1)

    @property
    def passed(self) -> bool:
        return self.decreasing and self.above_cos and self.max_gap <= self.gap_bound and self.min_a > 0.5


def bm_chain(lam: int, k: float) -> BmChain:
    """Top eigenvalues of B_0..B_L and the B_0 gap figure, without building the space."""
    alphas = tuple(bm_spectrum(lam, k, m).top for m in range(lam + 1))
    b0 = np.sort(np.real(bm_spectrum(lam, k, 0).eigenvalues))
    a = bm_offdiag(lam, k, 0)
    return BmChain(
        alphas=alphas,
        decreasing=all(x > y for x, y in zip(alphas, alphas[1:])),
        above_cos=alphas[0] > math.cos(math.pi / (lam + 2)),
        max_gap=float(np.max(np.diff(b0))) if b0.size > 1 else 0.0,
        gap_bound=2.0 * math.pi / (lam + 2) + 0.05,
        min_a=float(np.min(a)) if a.size else math.inf,
    )


def sphere_Bm_chain(space: FuzzySphereSpace) -> BmChain:
    return bm_chain(space.lam, space.k)


def alpha1_monotone(lam_max: int, k_policy: KPolicyLike = KPolicy.LAMBDA6,
                    k_value: Optional[float] = None) -> Tuple[List[float], bool]:
    """alpha_1(L; 0) for L = 1..lam_max and whether it strictly increases."""
    vals = [bm_spectrum(lam, resolve_k(k_policy, lam, k_value), 0).top for lam in range(1, lam_max + 1)]
    return vals, all(x < y for x, y in zip(vals, vals[1:]))


@dataclass(frozen=True)
class ChiTildeComparison:
    disp: float
    intermediate_bound: float      # sin^2(pi/(L+2)) + (2/3 + 2/(3L) + 1/L^2)/(L+1)^2
    pi_bound: float                # pi^2/(L+2)^2 + 1/(L+1)^2
    coarse_bound: float            # 11/(L+1)^2
    madore: float                  # 1/(L+1)

    @property
    def below_intermediate(self) -> bool:
        return self.disp < self.intermediate_bound

    @property
    def below_pi_bound(self) -> bool:
        return self.disp < self.pi_bound

    @property
    def below_madore(self) -> bool:
        return self.disp < self.madore


def sphere_chi_tilde(space: FuzzySphereSpace) -> Tuple[StateVector, DispersionReport, ChiTildeComparison]:
    """chi~_l = sqrt(2/(L+2)) sin((l+1) pi/(L+2)) on psi_l^0."""
    lam = space.lam
    amp = np.zeros(space.dim, dtype=complex)
    for l in range(lam + 1):
        amp[space.index(l, 0)] = math.sqrt(2.0 / (lam + 2)) * math.sin((l + 1) * math.pi / (lam + 2))
    state = StateVector.normalized(amp, space.basis)
    rep = sphere_dispersion(space, state)
    n2 = (lam + 1) ** 2
    cmp = ChiTildeComparison(
        disp=rep.disp_x2,
        intermediate_bound=math.sin(math.pi / (lam + 2)) ** 2
        + (2.0 / 3.0 + 2.0 / (3.0 * lam) + 1.0 / lam ** 2) / n2,
        pi_bound=math.pi ** 2 / (lam + 2) ** 2 + 1.0 / n2,
        coarse_bound=11.0 / n2,
        madore=1.0 / (lam + 1),
    )
    return state, rep, cmp


def madore_comparison(space: FuzzySphereSpace) -> Dict[str, float]:
    """Smallest Madore dispersion at the same cutoff against phi^0 and chi~."""
    _, phi = sphere_scs_family(space, ScsFamily.PHI_L0)
    _, chi, _ = sphere_chi_tilde(space)
    return {
        "madore_min": madore_min_dispersion(space.lam),
        "phi0": phi.disp_x2,
        "chi_tilde": chi.disp_x2,
    }


# ---------------------------------------------------------------------------
# Rotation-matrix identities
# ---------------------------------------------------------------------------

def jacobi_lemma_check(l: int, j: int, h: int, n: int, nodes_theta: Optional[int] = None) -> float:
    """
    int_0^pi sin(theta) <psi_j^n, e^{i theta L2} psi_j^h> <e^{i theta L2} psi_l^h, psi_l^n> d theta
    by Gauss-Legendre in cos(theta); equals 2 delta_lj / (2l+1).
    """
    if min(l, j) < 0 or abs(h) > min(l, j) or abs(n) > min(l, j):
        raise ValueError(f"need |h|, |n| <= min(l, j), got l={l} j={j} h={h} n={n}")
    N = l + j + 1 if nodes_theta is None else int(nodes_theta)
    if N < l + j + 1:
        raise ValueError(f"need at least {l + j + 1} theta nodes, got {N}")
    bl, bj = build_irrep(l), build_irrep(j)
    rule = make_rule("gauss_legendre", N)
    total = 0j
    for u, w in zip(rule.nodes, rule.weights):
        theta = math.acos(max(-1.0, min(1.0, u)))
        total += w * bj.rotation_theta(theta)[n + j, h + j] * np.conj(bl.rotation_theta(theta)[n + l, h + l])
    return float(total.real)


def jacobi_lemma_sign_patterns(l: int, j: int, h: int, n: int,
                               nodes_theta: Optional[int] = None) -> Dict[Tuple[int, int], float]:
    """The same integral for (+-h, +-n), keyed by the two signs."""
    return {(sh, sn): jacobi_lemma_check(l, j, sh * h, sn * n, nodes_theta)
            for sh in (1, -1) for sn in (1, -1)}


@dataclass(frozen=True)
class GaussDecompositionReport:
    l: int
    theta: float
    antinormal_residual: float
    normal_residual: float
    ill_conditioned: bool

    @property
    def residual(self) -> float:
        return max(self.antinormal_residual, self.normal_residual)


def _nilpotent_exp(N: np.ndarray) -> np.ndarray:
    """exp(N) for nilpotent N as the finite series, in the array's own arithmetic."""
    d = N.shape[0]
    out = np.eye(d, dtype=object)
    term = np.eye(d, dtype=object)
    for p in range(1, d):
        term = (term @ N) * Fraction(1, p)
        if not term.any():
            break
        out = out + term
    return out


def gauss_decomposition_check(l: int, theta: float) -> GaussDecompositionReport:
    """
    Compare e^{i theta L2} with
      antinormal: e^{-t L_-} e^{2 log(cos(theta/2)) L0} e^{t L_+}
      normal:     e^{t L_+} e^{-2 log(cos(theta/2)) L0} e^{-t L_-}
    where t = tan(theta/2). With S = diag(sqrt((l+m)!/(l-m)!)) the factors
    become S (rational matrix) S^{-1}; the rational products are formed
    exactly so that the large cancelling terms near theta = pi leave no
    rounding behind.
    """
    if not 0.0 <= theta < math.pi:
        raise ValueError(f"theta must lie in [0, pi), got {theta!r}")
    block = build_irrep(l)
    l = block.l
    d = block.dim
    t = Fraction(math.tan(theta / 2.0))
    c2 = 1 / (1 + t * t)            # cos^2(theta/2)

    Jp = np.zeros((d, d), dtype=object)
    Km = np.zeros((d, d), dtype=object)
    for i, m in enumerate(range(-l, l)):
        Jp[i + 1, i] = Fraction(1)
        Km[i, i + 1] = Fraction((l + m + 1) * (l - m))
    D = np.diag([c2 ** m for m in range(-l, l + 1)]).astype(object)
    D_inv = np.diag([c2 ** -m for m in range(-l, l + 1)]).astype(object)

    anti = _nilpotent_exp(-t * Km) @ D @ _nilpotent_exp(t * Jp)
    normal = _nilpotent_exp(t * Jp) @ D_inv @ _nilpotent_exp(-t * Km)

    ms = range(-l, l + 1)
    scale = np.array([[math.sqrt(float(factorial_ratio(l + ma, l + mb) * factorial_ratio(l - mb, l - ma)))
                       for mb in ms] for ma in ms])
    ref = block.rotation_theta(theta)
    rep = GaussDecompositionReport(
        l=l,
        theta=float(theta),
        antinormal_residual=max_abs(anti.astype(float) * scale - ref),
        normal_residual=max_abs(normal.astype(float) * scale - ref),
        ill_conditioned=theta > 0.9 * math.pi,
    )
    _dbg(f"gauss l={l} theta={theta!r} residual={rep.residual:.3e}")
    return rep
