#!/usr/bin/env -S python3 -u
"""
Linear algebra and quadrature kernel for fuzzy-workbench.

Contains:
- BasisTag / StateVector records and matrix validation
- hermitian_eigen: cyclic complex Jacobi rotations
- sym_tridiag_eigen: implicit-shift QL for symmetric tridiagonal matrices
- poly_roots: Aberth-Ehrlich simultaneous iteration with Newton polishing
- make_rule: periodic trapezoid and Gauss-Legendre rules
- expect / variance / dispersion_report for pure and mixed states
- random_state / random_density_matrix (seeded)

Everything is dense complex128. Sums are reduced in a fixed order so a
run is bit-stable for a given seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np

from config import MAX_SWEEPS, TOL_FACTOR, env_flag

_DEBUG = env_flag("FUZZY_DEBUG_NUMERICS")

_EPS = np.finfo(float).eps


def _dbg(msg: str) -> None:
    if _DEBUG:
        print(f"[numerics] {msg}", flush=True)


# ---------------------------------------------------------------------------
# Errors
# ---------------------------------------------------------------------------

class NumericsError(Exception):
    """Base class for kernel failures."""


class NonHermitianError(NumericsError):
    """Matrix handed to a Hermitian routine is not Hermitian."""

    def __init__(self, residual: float):
        self.residual = residual
        super().__init__(f"matrix is not Hermitian (max|A - A^H| = {residual:.3e})")


class ConvergenceError(NumericsError):
    """Iteration did not reach its tolerance; carries the best residual seen."""

    def __init__(self, what: str, residual: float):
        self.residual = residual
        super().__init__(f"{what} did not converge (best residual {residual:.3e})")


class DimensionError(NumericsError, ValueError):
    """Operand shapes do not fit together."""


# ---------------------------------------------------------------------------
# Basis tags and states
# ---------------------------------------------------------------------------

class BasisKind(Enum):
    CIRCLE = "circle"
    SPHERE = "sphere"
    IRREP = "irrep"


@dataclass(frozen=True)
class BasisTag:
    """Which basis a state lives in: circle(L), sphere(L) or irrep(l)."""
    kind: BasisKind
    label: int

    @property
    def dim(self) -> int:
        if self.kind is BasisKind.CIRCLE:
            return 2 * self.label + 1
        if self.kind is BasisKind.SPHERE:
            return (self.label + 1) ** 2
        return 2 * self.label + 1


@dataclass(frozen=True, eq=False)
class StateVector:
    """Unit vector of complex amplitudes, optionally tagged with its basis."""
    amplitudes: np.ndarray
    basis: Optional[BasisTag] = None

    def __post_init__(self) -> None:
        amp = np.array(self.amplitudes, dtype=complex).ravel()
        if amp.size == 0:
            raise DimensionError("empty state vector")
        if not np.all(np.isfinite(amp)):
            raise NumericsError("state vector has non-finite amplitudes")
        if self.basis is not None and self.basis.dim != amp.size:
            raise DimensionError(f"{amp.size} amplitudes for a basis of dimension {self.basis.dim}")
        norm = float(np.linalg.norm(amp))
        if abs(norm - 1.0) > 1e-12:
            raise NumericsError(f"state vector is not normalized (norm {norm!r})")
        amp.flags.writeable = False
        object.__setattr__(self, "amplitudes", amp)

    @classmethod
    def normalized(cls, amplitudes, basis: Optional[BasisTag] = None) -> "StateVector":
        amp = np.array(amplitudes, dtype=complex).ravel()
        norm = float(np.linalg.norm(amp))
        if norm == 0.0 or not math.isfinite(norm):
            raise NumericsError("cannot normalize a zero or non-finite vector")
        return cls(amp / norm, basis)

    @property
    def dim(self) -> int:
        return int(self.amplitudes.size)

    def __repr__(self) -> str:
        return f"StateVector(dim={self.dim}, basis={self.basis})"


StateLike = Union[StateVector, np.ndarray]


# ---------------------------------------------------------------------------
# Matrix helpers
# ---------------------------------------------------------------------------

def max_abs(a: np.ndarray) -> float:
    return float(np.max(np.abs(a))) if np.size(a) else 0.0


def hermiticity_residual(a: np.ndarray) -> float:
    return max_abs(a - a.conj().T)


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def as_matrix(a, hermitian: bool = False) -> np.ndarray:
    """Validate a square finite complex matrix; optionally require A = A^H."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NumericsError("matrix has non-finite entries")
    if hermitian:
        res = hermiticity_residual(m)
        if res > 1e-13 * max(max_abs(m), 1e-300):
            raise NonHermitianError(res)
    return m


# ---------------------------------------------------------------------------
# Spectrum reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SpectrumReport:
    """
    Eigenpairs sorted by descending (real part of) eigenvalue.

    eigenvectors are the columns of a matrix. property_flags carries
    symmetric_spectrum, simple and interlaces_previous (None until a
    caller compares against a previous spectrum), plus any flags the
    producing routine adds.
    """
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residual: float
    property_flags: Dict[str, Optional[bool]] = field(default_factory=dict)

    def with_flag(self, name: str, value: Optional[bool]) -> "SpectrumReport":
        flags = dict(self.property_flags)
        flags[name] = value
        return replace(self, property_flags=flags)

    @property
    def top(self) -> float:
        return float(np.real(self.eigenvalues[0]))


def spectrum_flags(values: np.ndarray, scale: float) -> Dict[str, Optional[bool]]:
    """symmetric_spectrum / simple flags for a descending real spectrum."""
    vals = np.real(np.asarray(values))
    n = vals.size
    tol = TOL_FACTOR * max(scale, 1e-300)
    symmetric = bool(np.max(np.abs(vals + vals[::-1])) <= tol) if n else True
    spread = float(vals[0] - vals[-1]) if n else 0.0
    if n <= 1:
        simple = True
    else:
        gaps = vals[:-1] - vals[1:]
        simple = bool(spread > 0.0 and float(np.min(gaps)) > 1e-12 * spread)
    return {"symmetric_spectrum": symmetric, "simple": simple, "interlaces_previous": None}


def _fix_phases(vecs: np.ndarray) -> np.ndarray:
    """Make the first largest-modulus component of each column real positive."""
    out = vecs.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        idx = int(np.argmax(np.abs(col)))
        mag = abs(col[idx])
        if mag > 0.0:
            out[:, j] = col * (np.conj(col[idx]) / mag)
    return out


def _sort_descending(values: np.ndarray, vecs: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    order = np.argsort(-np.real(values), kind="stable")
    return values[order], vecs[:, order]


# ---------------------------------------------------------------------------
# Hermitian eigensolver: cyclic complex Jacobi
# ---------------------------------------------------------------------------

def _off_norm(w: np.ndarray, scale: float) -> float:
    """Frobenius norm of the off-diagonal part, computed on w/scale."""
    off = w / max(scale, 1e-300)
    np.fill_diagonal(off, 0.0)
    return float(np.linalg.norm(off)) * scale


def hermitian_eigen(a, tol_factor: Optional[float] = None) -> SpectrumReport:
    """
    Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Each (p, q) rotation first removes the phase of a_pq with diag(1, e^{-i phi})
    and then applies the real symmetric Jacobi rotation, so one step is
    U = [[c, s], [-s e^{-i phi}, c e^{-i phi}]].

    Raises NonHermitianError (with the residual) for non-Hermitian input and
    ConvergenceError if MAX_SWEEPS sweeps are not enough.
    """
    tol_factor = TOL_FACTOR if tol_factor is None else tol_factor
    A = as_matrix(a, hermitian=True)
    n = A.shape[0]
    if n == 0:
        raise DimensionError("empty matrix")
    scale = max_abs(A)

    W = 0.5 * (A + A.conj().T)
    V = np.eye(n, dtype=complex)
    stop = n * _EPS * scale

    sweeps = 0
    while _off_norm(W, scale) > stop:
        if sweeps >= MAX_SWEEPS:
            raise ConvergenceError("Jacobi sweep", _off_norm(W, scale))
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = W[p, q]
                mag = abs(apq)
                if mag <= _EPS * _EPS * scale:
                    continue
                phase = apq / mag
                theta = (W[q, q].real - W[p, p].real) / (2.0 * mag)
                t = 1.0 / (abs(theta) + math.hypot(theta, 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                U = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]], dtype=complex)
                idx = [p, q]
                W[:, idx] = W[:, idx] @ U
                W[idx, :] = U.conj().T @ W[idx, :]
                W[p, q] = 0.0
                W[q, p] = 0.0
                W[p, p] = W[p, p].real
                W[q, q] = W[q, q].real
                V[:, idx] = V[:, idx] @ U
    _dbg(f"jacobi n={n} sweeps={sweeps}")

    values, vecs = _sort_descending(np.real(np.diag(W)).copy(), V)
    vecs = _fix_phases(vecs)
    residual = max_abs(np.linalg.norm(A @ vecs - vecs * values, axis=0))
    if residual > tol_factor * max(scale, 1e-300):
        raise ConvergenceError("Jacobi eigenpairs", residual)
    return SpectrumReport(values, vecs, residual, spectrum_flags(values, scale))


# ---------------------------------------------------------------------------
# Symmetric tridiagonal eigensolver: implicit-shift QL (tqli)
# ---------------------------------------------------------------------------

_QL_MAX_ITER = 60


def tridiag_matvec(diag: np.ndarray, offdiag: np.ndarray, v: np.ndarray) -> np.ndarray:
    out = diag[:, None] * v if v.ndim == 2 else diag * v
    if offdiag.size:
        out[:-1] += offdiag[:, None] * v[1:] if v.ndim == 2 else offdiag * v[1:]
        out[1:] += offdiag[:, None] * v[:-1] if v.ndim == 2 else offdiag * v[:-1]
    return out


def sym_tridiag_eigen(diag: Sequence[float], offdiag: Sequence[float],
                      tol_factor: Optional[float] = None) -> SpectrumReport:
    """
    Eigenpairs of the real symmetric tridiagonal matrix with the given
    diagonal and off-diagonal, by QL with implicit Wilkinson-style shifts.
    """
    tol_factor = TOL_FACTOR if tol_factor is None else tol_factor
    d0 = np.asarray(diag, dtype=float).ravel()
    e0 = np.asarray(offdiag, dtype=float).ravel()
    n = d0.size
    if n == 0:
        raise DimensionError("empty tridiagonal matrix")
    if e0.size != n - 1:
        raise DimensionError(f"off-diagonal has length {e0.size}, expected {n - 1}")
    if not (np.all(np.isfinite(d0)) and np.all(np.isfinite(e0))):
        raise NumericsError("tridiagonal matrix has non-finite entries")

    d = d0.copy()
    # e[i] couples d[i] and d[i+1]; e[n-1] is a zero sentinel
    e = np.zeros(n)
    e[: n - 1] = e0
    z = np.eye(n)

    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) + dd == dd:
                    break
                m += 1
            if m == l:
                break
            if it == _QL_MAX_ITER:
                raise ConvergenceError("tridiagonal QL", float(np.max(np.abs(e))))
            it += 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = m - 1
            underflow = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                zi1 = z[:, i + 1].copy()
                z[:, i + 1] = s * z[:, i] + c * zi1
                z[:, i] = c * z[:, i] - s * zi1
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0

    values, vecs = _sort_descending(d, z)
    vecs = _fix_phases(vecs)
    scale = max(max_abs(d0), max_abs(e0))
    residual = max_abs(np.linalg.norm(tridiag_matvec(d0, e0, vecs) - vecs * values, axis=0))
    if residual > tol_factor * max(scale, 1e-300):
        raise ConvergenceError("tridiagonal eigenpairs", residual)
    return SpectrumReport(values, vecs, residual, spectrum_flags(values, scale))


# ---------------------------------------------------------------------------
# Polynomial roots
# ---------------------------------------------------------------------------

_ROOT_MAX_ITER = 500


def poly_roots(coeffs: Sequence[complex]) -> np.ndarray:
    """
    All complex roots of the polynomial with *coeffs* (highest degree first).

    Aberth-Ehrlich iteration from points on a circle enclosing every root,
    then a Newton polish that only accepts improving steps. Roots are
    returned sorted by descending real part, then descending imaginary part.
    Guarantees |p(root)| <= 1e-10 max|coeff|, else raises ConvergenceError.
    """
    c = np.asarray(coeffs, dtype=complex).ravel()
    if c.size == 0:
        raise NumericsError("no coefficients")
    if not np.all(np.isfinite(c)):
        raise NumericsError("non-finite coefficients")
    if c[0] == 0:
        raise NumericsError("leading coefficient is zero")
    n = c.size - 1
    if n == 0:
        return np.zeros(0, dtype=complex)

    mono = c / c[0]
    dmono = mono[:-1] * np.arange(n, 0, -1)
    # Fujiwara bound: every root lies inside this radius
    radius = 2.0 * max(abs(mono[k]) ** (1.0 / k) for k in range(1, n + 1))
    if radius == 0.0:
        return np.zeros(n, dtype=complex)
    z = radius * np.exp(1j * (2.0 * np.pi * np.arange(n) / n + 0.4))

    thresh = 1e-10 * max_abs(c)
    best = math.inf
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        for it in range(_ROOT_MAX_ITER):
            pv = np.polyval(mono, z)
            dv = np.polyval(dmono, z)
            ratio = np.where(dv != 0, pv / dv, pv)
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            inv = 1.0 / diff
            np.fill_diagonal(inv, 0.0)
            w = ratio / (1.0 - ratio * inv.sum(axis=1))
            w = np.where(np.isfinite(w), w, 0.0)
            z = z - w
            res = max_abs(np.polyval(c, z))
            best = min(best, res)
            if np.max(np.abs(w)) <= 4.0 * _EPS * max(1.0, max_abs(z)):
                break
        _dbg(f"aberth degree={n} iterations={it + 1} residual={best:.3e}")

        for _ in range(3):
            pv = np.polyval(mono, z)
            dv = np.polyval(dmono, z)
            cand = np.where(dv != 0, z - pv / dv, z)
            better = np.abs(np.polyval(mono, cand)) < np.abs(pv)
            z = np.where(better & np.isfinite(cand), cand, z)

    res = max_abs(np.polyval(c, z))
    if not (res <= thresh):
        raise ConvergenceError("polynomial roots", min(best, res))
    order = np.lexsort((-np.round(z.imag, 9), -np.round(z.real, 9)))
    return z[order]


# ---------------------------------------------------------------------------
# Quadrature rules
# ---------------------------------------------------------------------------

class QuadratureKind(Enum):
    PERIODIC_TRAPEZOID = "periodic_trapezoid"
    GAUSS_LEGENDRE = "gauss_legendre"


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    kind: QuadratureKind
    nodes: np.ndarray
    weights: np.ndarray

    def integrate(self, values: np.ndarray) -> complex:
        return np.sum(self.weights * values)

    def __len__(self) -> int:
        return int(self.nodes.size)


def _legendre_nodes(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights on [-1, 1] by Newton on the recurrence."""
    k = np.arange(n)
    xu = np.linspace(-1.0, 1.0, n)
    y = np.cos((2 * k + 1) * np.pi / (2 * n)) + (0.27 / n) * np.sin(np.pi * xu * (n - 1) / (n + 1))

    for _ in range(100):
        p0 = np.ones_like(y)
        p1 = y.copy()
        for j in range(2, n + 1):
            p0, p1 = p1, ((2 * j - 1) * y * p1 - (j - 1) * p0) / j
        dp = n * (y * p1 - p0) / (y * y - 1.0) if n > 1 else np.ones_like(y)
        step = p1 / dp
        y = y - step
        if np.max(np.abs(step)) <= 1e-15:
            break
    else:
        raise ConvergenceError("Gauss-Legendre nodes", float(np.max(np.abs(step))))

    p0 = np.ones_like(y)
    p1 = y.copy()
    for j in range(2, n + 1):
        p0, p1 = p1, ((2 * j - 1) * y * p1 - (j - 1) * p0) / j
    dp = n * (y * p1 - p0) / (y * y - 1.0) if n > 1 else np.ones_like(y)
    w = 2.0 / ((1.0 - y * y) * dp * dp)
    order = np.argsort(y)
    return y[order], w[order]


def make_rule(kind: Union[QuadratureKind, str], node_count: int,
              interval: Optional[Tuple[float, float]] = None) -> QuadratureRule:
    """
    Build a quadrature rule.

    periodic_trapezoid: M equispaced nodes a + jL/M with weights L/M
    (default interval [0, 2pi)); exact for trigonometric polynomials of
    degree < M. gauss_legendre: exact for polynomials of degree <= 2N-1
    (default interval [-1, 1]).
    """
    try:
        kind = QuadratureKind(kind)
    except ValueError as e:
        raise NumericsError(f"unsupported quadrature kind: {kind!r}") from e
    if int(node_count) != node_count or node_count < 1:
        raise ValueError(f"node_count must be a positive integer, got {node_count!r}")
    n = int(node_count)

    if kind is QuadratureKind.PERIODIC_TRAPEZOID:
        a, b = interval if interval is not None else (0.0, 2.0 * np.pi)
        length = b - a
        nodes = a + length * np.arange(n) / n
        weights = np.full(n, length / n)
        return QuadratureRule(kind, nodes, weights)

    a, b = interval if interval is not None else (-1.0, 1.0)
    y, w = _legendre_nodes(n)
    nodes = 0.5 * (a + b) + 0.5 * (b - a) * y
    weights = 0.5 * (b - a) * w
    return QuadratureRule(kind, nodes, weights)


# ---------------------------------------------------------------------------
# Expectation values and dispersions
# ---------------------------------------------------------------------------

def _state_array(state: StateLike) -> np.ndarray:
    if isinstance(state, StateVector):
        return state.amplitudes
    arr = np.asarray(state, dtype=complex)
    if arr.ndim == 1:
        norm = float(np.linalg.norm(arr))
        if norm == 0.0:
            raise NumericsError("zero state vector")
        return arr / norm
    if arr.ndim == 2 and arr.shape[0] == arr.shape[1]:
        tr = np.trace(arr)
        if abs(tr) == 0.0:
            raise NumericsError("density matrix has zero trace")
        return arr / tr
    raise DimensionError(f"expected a state vector or density matrix, got shape {arr.shape}")


def expect(op: np.ndarray, state: StateLike) -> complex:
    """<v, A v> for a vector, tr(A rho) for a density matrix."""
    s = _state_array(state)
    if op.shape[0] != s.shape[0]:
        raise DimensionError(f"operator of size {op.shape[0]} on a state of size {s.shape[0]}")
    if s.ndim == 1:
        return complex(np.vdot(s, op @ s))
    return complex(np.sum(op * s.T))


def _real_expect(op: np.ndarray, state: StateLike) -> float:
    val = expect(op, state)
    if abs(val.imag) > 1e-11 * max(1.0, max_abs(op)):
        raise NumericsError(f"expectation has imaginary part {val.imag:.3e}; operator not Hermitian?")
    return val.real


def variance(op: np.ndarray, state: StateLike) -> float:
    mean = _real_expect(op, state)
    return _real_expect(op @ op, state) - mean * mean


@dataclass(frozen=True, eq=False)
class DispersionReport:
    """First and second moments plus the invariant dispersions."""
    mean_x: np.ndarray
    mean_L: np.ndarray
    mean_x2: float
    mean_L2: float
    disp_x2: float
    disp_L2: float


def dispersion_report(xs: Sequence[np.ndarray], Ls: Sequence[np.ndarray],
                      state: StateLike) -> DispersionReport:
    """
    Means <x_i>, <L_i> (real parts) and (Dx)^2 = sum <x_i^2> - sum <x_i>^2,
    likewise (DL)^2. Works on a StateVector, a raw vector or a density matrix.
    """
    s = _state_array(state)
    dim = s.shape[0]
    for op in list(xs) + list(Ls):
        if op.shape != (dim, dim):
            raise DimensionError(f"operator of shape {op.shape} on a state of size {dim}")

    mean_x = np.array([_real_expect(x, s) for x in xs], dtype=float)
    mean_L = np.array([_real_expect(L, s) for L in Ls], dtype=float)
    mean_x2 = float(sum(_real_expect(x @ x, s) for x in xs))
    mean_L2 = float(sum(_real_expect(L @ L, s) for L in Ls))
    disp_x2 = mean_x2 - float(np.dot(mean_x, mean_x))
    disp_L2 = mean_L2 - float(np.dot(mean_L, mean_L))
    return DispersionReport(mean_x, mean_L, mean_x2, mean_L2, disp_x2, disp_L2)


# ---------------------------------------------------------------------------
# Random states
# ---------------------------------------------------------------------------

def random_state(dim: int, seed: Union[int, np.random.Generator],
                 basis: Optional[BasisTag] = None) -> StateVector:
    """Normalized vector of i.i.d. standard complex normal amplitudes."""
    if dim < 1:
        raise DimensionError(f"dimension must be positive, got {dim}")
    rng = np.random.default_rng(seed)
    amp = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return StateVector.normalized(amp, basis)


def random_density_matrix(dim: int, seed: Union[int, np.random.Generator], count: int = 4) -> np.ndarray:
    """Convex mixture of *count* (1..4) random pure states with random weights."""
    if not 1 <= count <= 4:
        raise ValueError(f"count must be in 1..4, got {count}")
    rng = np.random.default_rng(seed)
    weights = rng.dirichlet(np.ones(count))
    rho = np.zeros((dim, dim), dtype=complex)
    for w in weights:
        v = random_state(dim, rng).amplitudes
        rho += w * np.outer(v, v.conj())
    return rho


# ---------------------------------------------------------------------------
# Shared result records
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ResidualSuite:
    """Named residuals of a family of relations, judged against one tolerance."""
    residuals: Dict[str, float]
    tol: float

    @property
    def passed(self) -> bool:
        return all(v <= self.tol for v in self.residuals.values())

    @property
    def worst(self) -> Tuple[str, float]:
        name = max(self.residuals, key=lambda n: self.residuals[n])
        return name, self.residuals[name]

    def __getitem__(self, name: str) -> float:
        return self.residuals[name]


@dataclass(frozen=True)
class UncertaintyAudit:
    """Slacks (lhs - rhs, >= 0 when the inequality holds) and the rhs values."""
    slacks: Dict[str, float]
    rhs: Dict[str, float]

    @property
    def min_slack(self) -> Tuple[str, float]:
        name = min(self.slacks, key=lambda n: self.slacks[n])
        return name, self.slacks[name]


@dataclass(frozen=True, eq=False)
class ResolutionReport:
    """
    Quadrature reconstruction of a coherent-state resolution of the identity.

    residual is max|B - I|; profile is the diagonal weight per block that
    must equal 1 for the resolution to hold; measured_constant is
    tr(integral of P)/N against the expected normalization.
    """
    residual: float
    measured_constant: float
    expected_constant: float
    profile: np.ndarray
    norm_condition: bool
    nodes: Tuple[int, ...]
    under_resolved: bool


def interlaces(larger: Sequence[float], smaller: Sequence[float], tol: float = 1e-10) -> bool:
    """
    Weak interlacing of two descending spectra whose sizes differ by d:
    larger[i+d] <= smaller[i] <= larger[i], with at most one value of
    *smaller* strictly inside each gap of *larger*.
    """
    big = np.sort(np.real(np.asarray(larger, dtype=complex)))[::-1]
    small = np.sort(np.real(np.asarray(smaller, dtype=complex)))[::-1]
    d = big.size - small.size
    if d < 1:
        raise DimensionError(f"larger spectrum has {big.size} values, smaller {small.size}")
    for i, s in enumerate(small):
        if not (big[i + d] - tol <= s <= big[i] + tol):
            return False
    for j in range(big.size - 1):
        inside = np.sum((small > big[j + 1] + tol) & (small < big[j] - tol))
        if inside > 1:
            return False
    return True
