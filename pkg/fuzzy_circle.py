#!/usr/bin/env -S python3 -u
"""
The fuzzy circle S^1_L.

The Hilbert space is spanned by psi_n, n = -L..L (basis index n + L). The
coordinates act as weighted shifts x_+ psi_n = b_{n+1} psi_{n+1} with
b_n = sqrt(1 + n(n-1)/k), and L psi_n = n psi_n.

Contains:
- FuzzyCircleSpace / build_circle
- verify_circle_algebra, circle_su2_check
- coherent states (circle_scs_omega) and their resolution of the identity
- uncertainty audits (circle_ur_audit)
- the L=1 minimizer and its (s, t, alpha) parametrization
- the x1 spectrum analysis and the a_1^mu = L - i mu x1 eigenproblem
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import Polynomial

from config import KPolicy, KPolicyLike, env_flag, resolve_k
from numerics import (
    BasisKind, BasisTag, ResidualSuite, ResolutionReport, SpectrumReport,
    StateLike, StateVector, UncertaintyAudit, commutator, dispersion_report,
    expect, hermiticity_residual, interlaces, make_rule, max_abs, poly_roots,
    sym_tridiag_eigen, variance,
)

_DEBUG = env_flag("FUZZY_DEBUG_CIRCLE")


def _dbg(msg: str) -> None:
    if _DEBUG:
        print(f"[circle] {msg}", flush=True)


# ---------------------------------------------------------------------------
# Space
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FuzzyCircleSpace:
    lam: int
    k: float
    b: np.ndarray              # b[n + lam] = b_n for n = -lam..lam+1
    L: np.ndarray
    xp: np.ndarray
    xm: np.ndarray
    x1: np.ndarray
    x2: np.ndarray
    x_sq: np.ndarray
    P_top: np.ndarray          # projector on psi_lam
    P_bottom: np.ndarray       # projector on psi_{-lam}
    k_policy: KPolicyLike = KPolicy.MIN_KINEQ
    k_value: Optional[float] = None

    @property
    def dim(self) -> int:
        return 2 * self.lam + 1

    @property
    def n_values(self) -> np.ndarray:
        return np.arange(-self.lam, self.lam + 1)

    @property
    def basis(self) -> BasisTag:
        return BasisTag(BasisKind.CIRCLE, self.lam)

    @property
    def edge_factor(self) -> float:
        """1 + L(L+1)/k, the weight of the edge projectors."""
        return 1.0 + self.lam * (self.lam + 1) / self.k

    def b_at(self, n: int) -> float:
        if n < -self.lam or n > self.lam + 1:
            return 0.0
        return float(self.b[n + self.lam])

    def basis_state(self, n: int) -> StateVector:
        amp = np.zeros(self.dim, dtype=complex)
        amp[n + self.lam] = 1.0
        return StateVector(amp, self.basis)

    def L_prime(self) -> np.ndarray:
        """[x1, x2] = i L'."""
        return -self.L / self.k + 0.5 * self.edge_factor * (self.P_top - self.P_bottom)

    def __repr__(self) -> str:
        return f"FuzzyCircleSpace(lam={self.lam}, k={self.k})"


def circle_b(lam: int, k: float) -> np.ndarray:
    """b_n for n = -lam..lam+1; zero at both ends."""
    out = np.zeros(2 * lam + 2)
    for n in range(1 - lam, lam + 1):
        out[n + lam] = math.sqrt(1.0 + n * (n - 1) / k)
    return out


def build_circle(lam: int, k_policy: KPolicyLike = KPolicy.MIN_KINEQ,
                 k_value: Optional[float] = None) -> FuzzyCircleSpace:
    k = resolve_k(k_policy, lam, k_value)
    lam = int(lam)
    dim = 2 * lam + 1
    b = circle_b(lam, k)

    xp = np.zeros((dim, dim), dtype=complex)
    for n in range(-lam, lam):
        xp[n + 1 + lam, n + lam] = b[n + 1 + lam]
    xm = xp.conj().T.copy()
    L = np.diag(np.arange(-lam, lam + 1).astype(complex))
    x1 = 0.5 * (xp + xm)
    x2 = (xp - xm) / 2j
    P_top = np.zeros((dim, dim), dtype=complex)
    P_top[-1, -1] = 1.0
    P_bottom = np.zeros((dim, dim), dtype=complex)
    P_bottom[0, 0] = 1.0
    _dbg(f"built lam={lam} k={k}")
    return FuzzyCircleSpace(lam, k, b, L, xp, xm, x1, x2, x1 @ x1 + x2 @ x2,
                            P_top, P_bottom, k_policy, k_value)


# ---------------------------------------------------------------------------
# Algebra
# ---------------------------------------------------------------------------

def circle_x_sq_table(space: FuzzyCircleSpace) -> np.ndarray:
    """<x^2> (= (Dx)^2) on psi_n: 1 + n^2/k inside, (1 + L(L-1)/k)/2 at the edges."""
    lam, k = space.lam, space.k
    out = 1.0 + space.n_values.astype(float) ** 2 / k
    out[0] = out[-1] = 0.5 * (1.0 + lam * (lam - 1) / k)
    return out


def verify_circle_algebra(space: FuzzyCircleSpace, tol: Optional[float] = None) -> ResidualSuite:
    """Residuals of the defining relations of S^1_L."""
    tol = 1e-11 * (space.lam + 1) if tol is None else tol
    lam, dim = space.lam, space.dim
    eye = np.eye(dim)
    edge = space.edge_factor
    L, xp, xm = space.L, space.xp, space.xm

    minimal = np.eye(dim, dtype=complex)
    for m in range(-lam, lam + 1):
        minimal = minimal @ (L - m * eye)

    res = {
        "hermitian": max(hermiticity_residual(L), hermiticity_residual(space.x1),
                         hermiticity_residual(space.x2), max_abs(xp.conj().T - xm)),
        "L_xplus": max_abs(commutator(L, xp) - xp),
        "L_xminus": max_abs(commutator(L, xm) + xm),
        "xplus_xminus": max_abs(commutator(xp, xm)
                                - (-2.0 * L / space.k + edge * (space.P_top - space.P_bottom))),
        "x_squared": max_abs(space.x_sq
                             - (eye + L @ L / space.k - 0.5 * edge * (space.P_top + space.P_bottom))),
        "L_minimal_polynomial": max_abs(minimal),
        "xplus_nilpotent": max_abs(np.linalg.matrix_power(xp, 2 * lam + 1)),
        "xminus_nilpotent": max_abs(np.linalg.matrix_power(xm, 2 * lam + 1)),
        "x_squared_spectrum": max_abs(np.real(np.diag(space.x_sq)) - circle_x_sq_table(space)),
    }
    return ResidualSuite(res, tol)


def f_plus(space: FuzzyCircleSpace, s: float) -> float:
    """x_+ = f_+(E0) E_+ with f_+(s) = sqrt((1 + s(s-1)/k) / (L(L+1) - s(s-1)))."""
    den = space.lam * (space.lam + 1) - s * (s - 1)
    if den <= 0:
        return 0.0
    return math.sqrt((1.0 + s * (s - 1) / space.k) / den)


def circle_su2_check(space: FuzzyCircleSpace) -> float:
    """
    Largest deviation between S^1_L and the spin-L su(2) irrep dressed by
    f_+-: L = E0, x_+ = f_+(E0) E_+, x_- = f_-(E0) E_- with f_-(s) = f_+(s+1).
    """
    lam = space.lam
    dim = space.dim
    n = space.n_values
    Ep = np.zeros((dim, dim), dtype=complex)
    for i, m in enumerate(range(-lam, lam)):
        Ep[i + 1, i] = math.sqrt(lam * (lam + 1) - m * (m + 1))
    Em = Ep.conj().T
    E0 = np.diag(n.astype(complex))
    fp = np.diag([f_plus(space, s) for s in n])
    fm = np.diag([f_plus(space, s + 1) for s in n])
    return max(
        max_abs(space.L - E0),
        max_abs(space.xp - fp @ Ep),
        max_abs(space.xm - fm @ Em),
        max_abs(commutator(E0, Ep) - Ep),
        max_abs(commutator(Ep, Em) - 2.0 * E0),
    )


# ---------------------------------------------------------------------------
# Coherent states
# ---------------------------------------------------------------------------

def o2_equivariant(beta: Sequence[float]) -> bool:
    """beta_{-m} = beta_m: the family is mapped into itself by the parity."""
    b = np.asarray(beta, dtype=float)
    return bool(np.allclose(b, b[::-1], rtol=0.0, atol=1e-15))


def circle_scs_omega(space: FuzzyCircleSpace, alpha: float = 0.0,
                     beta: Optional[Sequence[float]] = None) -> StateVector:
    """omega_alpha^beta = sum_m e^{i(alpha m + beta_m)} psi_m / sqrt(2L+1)."""
    beta = np.zeros(space.dim) if beta is None else np.asarray(beta, dtype=float)
    if beta.shape != (space.dim,):
        raise ValueError(f"beta needs {space.dim} phases, got {beta.shape}")
    amp = np.exp(1j * (alpha * space.n_values + beta)) / math.sqrt(space.dim)
    return StateVector.normalized(amp, space.basis)


def circle_scs_mean_x2(space: FuzzyCircleSpace) -> float:
    lam, k = space.lam, space.k
    return 2 * lam / (2 * lam + 1) + 2 * (lam - 1) * lam * (lam + 1) / (3 * (2 * lam + 1) * k)


def circle_scs_mean_xplus(space: FuzzyCircleSpace, alpha: float = 0.0) -> complex:
    """<x_+> on omega_alpha^0: 2 e^{-i alpha} sum_{m=1}^{L} b_m / (2L+1)."""
    total = sum(space.b_at(m) for m in range(1, space.lam + 1))
    return 2.0 * np.exp(-1j * alpha) * total / space.dim


def circle_scs_bound(lam: int) -> float:
    """Upper bound on (Dx)^2 of omega^0: 2/(3(L+1)) for L >= 2, (1/2 + 1/(3L))/(L+1) at L = 1."""
    if lam >= 2:
        return 2.0 / (3.0 * (lam + 1))
    return (0.5 + 1.0 / (3.0 * lam)) / (lam + 1)


def circle_dispersion(space: FuzzyCircleSpace, state: StateLike):
    return dispersion_report((space.x1, space.x2), (space.L,), state)


def circle_resolution_check(space: FuzzyCircleSpace, beta: Optional[Sequence[float]] = None,
                            nodes: Optional[int] = None,
                            omega: Optional[StateVector] = None) -> ResolutionReport:
    """
    B = ((2L+1)/2pi) sum_j w_j P_{alpha_j} with P_alpha the projector on
    e^{i alpha L} omega, on M periodic nodes (default 2L+2). Exact once
    M >= 2L+1; fewer nodes alias the entries with |n_a - n_b| = M.
    """
    dim = space.dim
    M = 2 * space.lam + 2 if nodes is None else int(nodes)
    w_vec = (omega if omega is not None else circle_scs_omega(space, 0.0, beta)).amplitudes
    if w_vec.size != dim:
        raise ValueError(f"fiducial state has dimension {w_vec.size}, expected {dim}")
    rule = make_rule("periodic_trapezoid", M)
    n = space.n_values
    diff = n[:, None] - n[None, :]
    phases = np.zeros((dim, dim), dtype=complex)
    for a, w in zip(rule.nodes, rule.weights):
        phases += w * np.exp(1j * a * diff)
    raw = np.outer(w_vec, w_vec.conj()) * phases
    B = dim / (2.0 * math.pi) * raw
    profile = dim * np.abs(w_vec) ** 2
    return ResolutionReport(
        residual=max_abs(B - np.eye(dim)),
        measured_constant=float(np.real(np.trace(raw))) / dim,
        expected_constant=2.0 * math.pi / dim,
        profile=profile,
        norm_condition=bool(np.max(np.abs(profile - 1.0)) <= 1e-12),
        nodes=(M,),
        under_resolved=M < dim,
    )


# ---------------------------------------------------------------------------
# Uncertainty relations
# ---------------------------------------------------------------------------

def circle_ur_audit(space: FuzzyCircleSpace, state: StateLike) -> UncertaintyAudit:
    """
    Slacks of (DL)^2 (Dx_1)^2 >= <x_2>^2/4, (DL)^2 (Dx_2)^2 >= <x_1>^2/4,
    their sum, and the Robertson-Schroedinger inequality for (x_1, x_2),
    4 (Dx_1)^2 (Dx_2)^2 >= <L'>^2 + cov^2, cov = <x1 x2 + x2 x1> - 2<x1><x2>.
    """
    x1, x2, L = space.x1, space.x2, space.L
    dL = variance(L, state)
    dx1 = variance(x1, state)
    dx2 = variance(x2, state)
    m1 = expect(x1, state).real
    m2 = expect(x2, state).real
    lp = expect(space.L_prime(), state).real
    cov = expect(x1 @ x2 + x2 @ x1, state).real - 2.0 * m1 * m2
    rhs = {
        "hur_x1": 0.25 * m2 * m2,
        "hur_x2": 0.25 * m1 * m1,
        "hur_x": 0.25 * (m1 * m1 + m2 * m2),
        "robertson": lp * lp + cov * cov,
    }
    slacks = {
        "hur_x1": dL * dx1 - rhs["hur_x1"],
        "hur_x2": dL * dx2 - rhs["hur_x2"],
        "hur_x": dL * (dx1 + dx2) - rhs["hur_x"],
        "robertson": 4.0 * dx1 * dx2 - rhs["robertson"],
    }
    return UncertaintyAudit(slacks, rhs)


# ---------------------------------------------------------------------------
# L = 1: the exact minimizer
# ---------------------------------------------------------------------------

UNDERLINE_CHI = np.array([math.sqrt(5.0) / 4.0, math.sqrt(3.0 / 8.0), math.sqrt(5.0) / 4.0])
CHI_PLUS = np.array([0.5, math.sqrt(2.0) / 2.0, 0.5])


def lambda1_dispersion(s: float, t: float, alpha: float) -> float:
    """
    (Dx)^2 at L = 1 for s = |chi_0|^2, t = |chi_1 chi_{-1}| <= (1-s)/2 and
    alpha the relative phase: (1-s)/2 + s^2 - 2 s t cos(alpha).
    """
    return 0.5 * (1.0 - s) + s * s - 2.0 * s * t * math.cos(alpha)


def circle_lambda1_minimizer() -> Tuple[StateVector, float, float]:
    """underline-chi, its (Dx)^2 = 7/32 and (Dx)^2 = 1/4 of chi_+ for comparison."""
    space = build_circle(1)
    chi = StateVector(UNDERLINE_CHI.astype(complex), space.basis)
    plus = StateVector(CHI_PLUS.astype(complex), space.basis)
    return chi, circle_dispersion(space, chi).disp_x2, circle_dispersion(space, plus).disp_x2


def lambda1_grid_search(points: int = 41, rounds: int = 40) -> Tuple[float, Tuple[float, float, float]]:
    """
    Minimize lambda1_dispersion over s in [0,1], t = u(1-s)/2 with u in [0,1]
    and alpha in [0, 2pi): a coarse grid, then a shrinking local search.
    """
    grid = np.linspace(0.0, 1.0, points)
    alphas = np.linspace(0.0, 2.0 * math.pi, points, endpoint=False)
    S, U, A = np.meshgrid(grid, grid, alphas, indexing="ij")
    vals = 0.5 * (1.0 - S) + S * S - S * U * (1.0 - S) * np.cos(A)
    i = np.unravel_index(int(np.argmin(vals)), vals.shape)
    best = (float(S[i]), float(U[i]), float(A[i]))
    best_val = float(vals[i])

    step = np.array([1.0, 1.0, 2.0 * math.pi]) / (points - 1)
    for _ in range(rounds):
        improved = False
        for dim in range(3):
            for sgn in (-1.0, 1.0):
                cand = list(best)
                cand[dim] += sgn * step[dim]
                s, u = min(max(cand[0], 0.0), 1.0), min(max(cand[1], 0.0), 1.0)
                v = lambda1_dispersion(s, u * (1.0 - s) / 2.0, cand[2])
                if v < best_val:
                    best, best_val, improved = (s, u, cand[2]), v, True
        if not improved:
            step = step / 2.0
    s, u, a = best
    return best_val, (s, u * (1.0 - s) / 2.0, a % (2.0 * math.pi))


def lambda1_random_search(samples: int, seed: int) -> float:
    """Smallest (Dx)^2 at L = 1 over seeded random states (vectorized)."""
    rng = np.random.default_rng(seed)
    chi = rng.standard_normal((samples, 3)) + 1j * rng.standard_normal((samples, 3))
    chi /= np.linalg.norm(chi, axis=1)[:, None]
    p = np.abs(chi) ** 2
    mean_x2 = 0.5 * p[:, 0] + p[:, 1] + 0.5 * p[:, 2]
    mean_xp = np.conj(chi[:, 1]) * chi[:, 0] + np.conj(chi[:, 2]) * chi[:, 1]
    return float(np.min(mean_x2 - np.abs(mean_xp) ** 2))


# ---------------------------------------------------------------------------
# Spectrum of x1
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class X1Analysis:
    spectrum: SpectrumReport
    toeplitz_state: StateVector
    toeplitz_disp: float
    toeplitz_bound: float
    toeplitz_spectrum_gap: float

    @property
    def toeplitz_below_bound(self) -> bool:
        return self.toeplitz_disp < self.toeplitz_bound


def circle_x1_spectrum(space: FuzzyCircleSpace) -> SpectrumReport:
    """x1 is tridiagonal with zero diagonal and off-diagonal b_n / 2."""
    off = np.array([space.b_at(n) for n in range(1 - space.lam, space.lam + 1)]) / 2.0
    return sym_tridiag_eigen(np.zeros(space.dim), off)


def circle_x1_analysis(space: FuzzyCircleSpace) -> X1Analysis:
    """
    Spectrum of x1 with its symmetry and interlacing (against the L-1 space
    built with the same k policy), and the Toeplitz estimate
    chi_m = cos(pi m/(2L+2)) with its (Dx)^2 bound 3.5/(L+1)^2.
    """
    lam = space.lam
    spec = circle_x1_spectrum(space)
    if lam >= 2:
        prev = circle_x1_spectrum(build_circle(lam - 1, space.k_policy, space.k_value))
        spec = spec.with_flag("interlaces_previous", interlaces(spec.eigenvalues, prev.eigenvalues))

    chi = StateVector.normalized(np.cos(math.pi * space.n_values / (2 * lam + 2)), space.basis)
    disp = circle_dispersion(space, chi).disp_x2
    approx = np.cos(math.pi * np.arange(1, space.dim + 1) / (2 * lam + 2))
    gap = float(np.max(np.abs(np.sort(spec.eigenvalues)[::-1] - approx)))
    return X1Analysis(spec, chi, disp, 3.5 / (lam + 1) ** 2, gap)


# ---------------------------------------------------------------------------
# a_1^mu = L - i mu x1
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class AMuEigenpair:
    z: complex
    state: StateVector
    residual: float


def a_mu_matrix(space: FuzzyCircleSpace, mu: float) -> np.ndarray:
    return space.L - 1j * mu * space.x1


def a_mu_characteristic(space: FuzzyCircleSpace, mu: float) -> Tuple[Polynomial, List[Polynomial]]:
    """
    Run 2(n - z) chi_n - i mu (b_{n+1} chi_{n+1} + b_n chi_{n-1}) = 0 upward
    from chi_{-L} = 1; the last equation is the characteristic polynomial.
    Returns it (monic) and the chi_n as polynomials in z.
    """
    lam = space.lam
    z = Polynomial([0.0, 1.0])
    chis: List[Polynomial] = [Polynomial([1.0 + 0j])]
    prev = Polynomial([0j])
    for n in range(-lam, lam):
        cur = chis[-1]
        nxt = (2.0 * (n - z) * cur - 1j * mu * space.b_at(n) * prev) / (1j * mu * space.b_at(n + 1))
        prev = cur
        chis.append(nxt)
    char = 2.0 * (lam - z) * chis[-1] - 1j * mu * space.b_at(lam) * prev
    char = Polynomial(char.coef / char.coef[-1])
    return char, chis


def _refine(A: np.ndarray, z: complex, v: np.ndarray) -> Tuple[np.ndarray, float]:
    """Two inverse-iteration steps; keep whichever vector has the smaller residual."""
    dim = A.shape[0]
    best = v / np.linalg.norm(v)
    best_res = float(np.linalg.norm(A @ best - z * best))
    shift = z + 1e-10 * max(1.0, abs(z))
    cand = best
    for _ in range(2):
        try:
            cand = np.linalg.solve(A - shift * np.eye(dim), cand)
        except np.linalg.LinAlgError:
            break
        cand = cand / np.linalg.norm(cand)
        res = float(np.linalg.norm(A @ cand - z * cand))
        if res < best_res:
            best, best_res = cand, res
    return best, best_res


def circle_a_mu_eigen(space: FuzzyCircleSpace, mu: float) -> List[AMuEigenpair]:
    """
    Eigenpairs of L - i mu x1: roots of the recurrence polynomial, vectors by
    back-substitution (polished by inverse iteration). mu = 0 is the L basis.
    """
    A = a_mu_matrix(space, mu)
    if mu == 0.0:
        return [AMuEigenpair(complex(n), space.basis_state(int(n)), 0.0) for n in space.n_values[::-1]]

    char, chis = a_mu_characteristic(space, mu)
    roots = poly_roots(char.coef[::-1])
    out: List[AMuEigenpair] = []
    for z in roots:
        v = np.array([c(z) for c in chis], dtype=complex)
        v, res = _refine(A, complex(z), v)
        out.append(AMuEigenpair(complex(z), StateVector.normalized(v, space.basis), res))
    _dbg(f"a_mu lam={space.lam} mu={mu} worst residual={max(p.residual for p in out):.3e}")
    return out


def a_mu_pairing_residual(space: FuzzyCircleSpace, mu: float, pairs: Sequence[AMuEigenpair]) -> float:
    """
    For each (z, chi): distance from -z to the nearest eigenvalue, and the
    residual of chi'_n = (-1)^n chi_{-n} as an eigenvector for -z.
    """
    A = a_mu_matrix(space, mu)
    zs = np.array([p.z for p in pairs])
    sign = (-1.0) ** space.n_values
    worst = 0.0
    for p in pairs:
        gap = float(np.min(np.abs(zs + p.z)))
        partner = sign * p.state.amplitudes[::-1]
        res = float(np.linalg.norm(A @ partner + p.z * partner))
        worst = max(worst, gap, res)
    return worst


def a_mu_saturation(space: FuzzyCircleSpace, pair: AMuEigenpair) -> float:
    """(DL)^2 (Dx_1)^2 - <x_2>^2/4 on an eigenvector; vanishes for every real mu."""
    st = pair.state
    m2 = expect(space.x2, st).real
    return variance(space.L, st) * variance(space.x1, st) - 0.25 * m2 * m2


def lambda1_a_mu_table(mu: float) -> List[Dict[str, complex]]:
    """
    Closed-form moments of the L = 1 eigenvectors of L - i mu x1.

    z = 0 for every mu; z = +-sqrt(1 - mu^2/2), real for mu^2 <= 2 and
    imaginary beyond.
    """
    m2 = mu * mu
    rows: List[Dict[str, complex]] = [{
        "z": 0j,
        "mean_x2": (m2 + 4.0) / (2.0 * (m2 + 2.0)),
        "disp_x2": 0.5 + (2.0 - 3.0 * m2) / (m2 + 2.0) ** 2,
        "disp_L2": m2 / (m2 + 2.0),
    }]
    if m2 <= 2.0:
        for sgn in (1.0, -1.0):
            # <L> = z on these vectors
            z = sgn * math.sqrt(1.0 - m2 / 2.0)
            rows.append({
                "z": complex(z),
                "mean_x2": 0.5 + m2 / 8.0,
                "disp_x2": 0.5 - m2 / 8.0,
                "disp_L2": m2 / 4.0,
            })
    else:
        y = math.sqrt(m2 / 2.0 - 1.0)
        for sgn in (1.0, -1.0):
            rows.append({"z": complex(0.0, sgn * y), "mean_x2": 0.75, "disp_x2": 0.25, "disp_L2": 0.5})
    return rows
