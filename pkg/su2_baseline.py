#!/usr/bin/env -S python3 -u
"""
su(2) baseline for fuzzy-workbench.

Contains:
- IrrepBlock / build_irrep: the spin-l irreducible representation
- EulerAngles and block_rotation: e^{i phi L3} e^{i theta L2} e^{i psi L3} on one irrep
- spin_coherent: rotated highest-weight states
- DirectSum / theorem1_audit: the angular uncertainty slack on a direct sum of irreps
- MadoreFS: the Madore fuzzy sphere x_i = 2 L_i / sqrt(n^2 - 1), the reference
  every localization result is compared against
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import List, Sequence, Tuple, Union

import numpy as np

from numerics import (
    BasisKind, BasisTag, SpectrumReport, StateLike, StateVector,
    dispersion_report, hermitian_eigen, random_state,
)

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# Euler angles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EulerAngles:
    """g = (phi, theta, psi) with phi, psi in [0, 2pi) and theta in [0, pi]."""
    phi: float = 0.0
    theta: float = 0.0
    psi: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.phi < TWO_PI:
            raise ValueError(f"phi must lie in [0, 2pi), got {self.phi!r}")
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError(f"theta must lie in [0, pi], got {self.theta!r}")
        if not 0.0 <= self.psi < TWO_PI:
            raise ValueError(f"psi must lie in [0, 2pi), got {self.psi!r}")

    @classmethod
    def random(cls, rng: np.random.Generator) -> "EulerAngles":
        """Haar-distributed angles: uniform phi, psi and uniform cos(theta)."""
        phi = float(rng.uniform(0.0, TWO_PI))
        theta = float(math.acos(max(-1.0, min(1.0, rng.uniform(-1.0, 1.0)))))
        psi = float(rng.uniform(0.0, TWO_PI))
        return cls(phi, theta, psi)


IDENTITY = EulerAngles()


# ---------------------------------------------------------------------------
# Irreducible representations
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class IrrepBlock:
    """Spin-l matrices in the basis m = -l..l (ascending index order)."""
    l: int
    Lp: np.ndarray
    Lm: np.ndarray
    L1: np.ndarray
    L2: np.ndarray
    L3: np.ndarray

    @property
    def dim(self) -> int:
        return 2 * self.l + 1

    @property
    def m_values(self) -> np.ndarray:
        return np.arange(-self.l, self.l + 1)

    @property
    def L(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        return (self.L1, self.L2, self.L3)

    @cached_property
    def L2_eigen(self) -> SpectrumReport:
        """Eigendecomposition of L2, reused by every rotation of this block."""
        return hermitian_eigen(self.L2)

    def rotation_theta(self, theta: float) -> np.ndarray:
        """e^{i theta L2} from the cached eigendecomposition."""
        eig = self.L2_eigen
        V = eig.eigenvectors
        return (V * np.exp(1j * theta * eig.eigenvalues)) @ V.conj().T


def build_irrep(l: int) -> IrrepBlock:
    """L_+- psi^m = sqrt((l -+ m)(l +- m + 1)) psi^{m+-1}."""
    if int(l) != l or l < 0:
        raise ValueError(f"l must be a non-negative integer, got {l!r}")
    l = int(l)
    n = 2 * l + 1
    Lp = np.zeros((n, n), dtype=complex)
    for i, m in enumerate(range(-l, l)):
        Lp[i + 1, i] = math.sqrt((l - m) * (l + m + 1))
    Lm = Lp.conj().T.copy()
    L1 = 0.5 * (Lp + Lm)
    L2 = (Lp - Lm) / 2j
    L3 = np.diag(np.arange(-l, l + 1).astype(complex))
    return IrrepBlock(l, Lp, Lm, L1, L2, L3)


def block_rotation(block: IrrepBlock, g: EulerAngles) -> np.ndarray:
    """e^{i phi L3} e^{i theta L2} e^{i psi L3} restricted to one irrep."""
    m = block.m_values
    middle = block.rotation_theta(g.theta)
    return np.exp(1j * g.phi * m)[:, None] * middle * np.exp(1j * g.psi * m)[None, :]


def spin_coherent(l: int, g: EulerAngles) -> StateVector:
    """D(g)|l, l>."""
    block = build_irrep(l)
    return StateVector.normalized(block_rotation(block, g)[:, -1], BasisTag(BasisKind.IRREP, block.l))


# ---------------------------------------------------------------------------
# Direct sums and the angular uncertainty slack
# ---------------------------------------------------------------------------

class DirectSum:
    """Block-diagonal sum of irreps; basis index offset(l) + m + l."""

    def __init__(self, blocks: Sequence[IrrepBlock]):
        if not blocks:
            raise ValueError("a direct sum needs at least one block")
        self.blocks: List[IrrepBlock] = list(blocks)
        self.offsets: List[int] = []
        off = 0
        for b in self.blocks:
            self.offsets.append(off)
            off += b.dim
        self.dim = off
        self.L = tuple(self._stack(i) for i in range(3))

    @classmethod
    def up_to(cls, l_max: int) -> "DirectSum":
        return cls([build_irrep(l) for l in range(l_max + 1)])

    def _stack(self, which: int) -> np.ndarray:
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for b, off in zip(self.blocks, self.offsets):
            out[off:off + b.dim, off:off + b.dim] = b.L[which]
        return out

    def index(self, l: int, m: int) -> int:
        for b, off in zip(self.blocks, self.offsets):
            if b.l == l:
                if abs(m) > l:
                    raise ValueError(f"|m| > l for l={l}, m={m}")
                return off + m + l
        raise KeyError(f"no block with l={l}")

    def __repr__(self) -> str:
        return f"DirectSum(l={[b.l for b in self.blocks]})"


def angular_slack(Ls: Sequence[np.ndarray], state: StateLike) -> float:
    """<L^2> - |<L>| (|<L>| + 1)."""
    rep = dispersion_report([], Ls, state)
    mag = float(np.linalg.norm(rep.mean_L))
    return rep.mean_L2 - mag * (mag + 1.0)


def theorem1_audit(ops: Union[DirectSum, IrrepBlock], state: StateLike) -> float:
    """Angular uncertainty slack on a pure state or density matrix; >= 0."""
    return angular_slack(ops.L, state)


# ---------------------------------------------------------------------------
# Madore fuzzy sphere
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class MadoreFS:
    """x_i = 2 L_i / sqrt(n^2 - 1) on the spin-l irrep, n = 2l + 1."""
    l: int
    block: IrrepBlock
    x: Tuple[np.ndarray, np.ndarray, np.ndarray]

    @property
    def n(self) -> int:
        return 2 * self.l + 1

    @property
    def commutator_scale(self) -> float:
        """[x_i, x_j] = i * scale * eps_ijk x_k."""
        return 2.0 / math.sqrt(self.n * self.n - 1)

    def dispersion(self, state: StateLike) -> float:
        return dispersion_report(self.x, self.block.L, state).disp_x2


def madore_fs(l: int) -> MadoreFS:
    if int(l) != l or l < 1:
        raise ValueError(f"l must be a positive integer, got {l!r}")
    block = build_irrep(l)
    n = 2 * block.l + 1
    scale = 2.0 / math.sqrt(n * n - 1)
    return MadoreFS(block.l, block, tuple(scale * L for L in block.L))


def madore_min_dispersion(l: int) -> float:
    """(Dx)^2 on |l, l>; equals 1/(l+1), the smallest value on V_l."""
    fs = madore_fs(l)
    top = np.zeros(fs.block.dim, dtype=complex)
    top[-1] = 1.0
    return fs.dispersion(StateVector(top, BasisTag(BasisKind.IRREP, fs.l)))


def madore_random_search(l: int, samples: int, seed: int) -> float:
    """Smallest (Dx)^2 over seeded random states of V_l."""
    fs = madore_fs(l)
    rng = np.random.default_rng(seed)
    return min(fs.dispersion(random_state(fs.block.dim, rng)) for _ in range(samples))
