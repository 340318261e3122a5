#!/usr/bin/env -S python3 -u
"""
Configuration for fuzzy-workbench.

Contains:
- Environment helpers: debug flags and clamped numeric overrides
- KPolicy enum plus the callable k policies (MinKineq, LambdaSix, ExplicitK)
- resolve_k: the deformation parameter for a given cutoff
- RunConfig: validated run settings shared by the command line
- ConfigError and its subclasses

Nothing here imports the rest of the package, so every module can read
its tolerances and debug flags from this one place.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Union

__version__ = "0.1.0"

_FALSY = ("", "0", "false", "False", "no", "NO")


# ---------------------------------------------------------------------------
# Environment helpers
# ---------------------------------------------------------------------------

def env_flag(name: str) -> bool:
    """True if *name* (or the global FUZZY_DEBUG) is set to something truthy."""
    if os.environ.get(name, "").strip() not in _FALSY:
        return True
    return os.environ.get("FUZZY_DEBUG", "").strip() not in _FALSY


def env_float(name: str, default: float, low: float, high: float) -> float:
    """Float override from the environment, clamped to [low, high]."""
    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        v = float(raw)
    except ValueError:
        return default
    if not math.isfinite(v):
        return default
    return max(low, min(high, v))


def env_int(name: str, default: int, low: int, high: int) -> int:
    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        v = int(raw)
    except ValueError:
        return default
    return max(low, min(high, v))


# Relative tolerance factor for eigen residuals (times max|A|)
TOL_FACTOR = env_float("FUZZY_TOL_FACTOR", 1e-10, 1e-15, 1e-3)
# Cap on cyclic Jacobi sweeps
MAX_SWEEPS = env_int("FUZZY_MAX_SWEEPS", 60, 5, 500)

_DEBUG = env_flag("FUZZY_DEBUG_CONFIG")


def _dbg(msg: str) -> None:
    if _DEBUG:
        print(f"[config] {msg}", flush=True)


# ---------------------------------------------------------------------------
# Errors
# ---------------------------------------------------------------------------

class ConfigError(ValueError):
    """Invalid run configuration or input file."""


class KFloorError(ConfigError):
    """Deformation parameter below the floor k >= L^2 (L+1)^2."""

    def __init__(self, lam: int, k: float):
        self.lam = lam
        self.k = k
        self.floor = k_floor(lam)
        super().__init__(f"k={k} is below the floor {self.floor} for cutoff {lam}")


class AmplitudeFileError(ConfigError):
    """Malformed amplitude file."""

    def __init__(self, path: str, line_no: int, reason: str):
        self.path = path
        self.line_no = line_no
        super().__init__(f"{path}:{line_no}: {reason}")


# ---------------------------------------------------------------------------
# k policies: map a cutoff to the deformation parameter k
# ---------------------------------------------------------------------------

def k_floor(lam: int) -> int:
    """Smallest admissible k for cutoff *lam*."""
    return lam * lam * (lam + 1) * (lam + 1)


class KPolicy(Enum):
    MIN_KINEQ = "min_kineq"
    LAMBDA6 = "lambda6"
    EXPLICIT = "explicit"


class MinKineq:
    """k = L^2 (L+1)^2, the smallest value the positivity of x^2 allows."""
    __slots__ = ()

    def __call__(self, lam: int) -> float:
        return float(k_floor(lam))

    def __repr__(self) -> str:
        return "MinKineq()"


class LambdaSix:
    """k = L^6, raised to the floor where L^6 falls short (only L=1)."""
    __slots__ = ()

    def __call__(self, lam: int) -> float:
        return float(max(lam ** 6, k_floor(lam)))

    def __repr__(self) -> str:
        return "LambdaSix()"


class ExplicitK:
    """The same k for every cutoff."""
    __slots__ = ("k",)

    def __init__(self, k: float):
        self.k = float(k)

    def __call__(self, lam: int) -> float:
        return self.k

    def __repr__(self) -> str:
        return f"ExplicitK({self.k})"


KPolicyLike = Union[KPolicy, str, Callable[[int], float]]


def make_policy(policy: KPolicyLike, k_value: Optional[float] = None) -> Callable[[int], float]:
    """Turn a policy name, enum member or callable into a callable policy."""
    if callable(policy) and not isinstance(policy, (KPolicy, str)):
        return policy
    try:
        kind = KPolicy(policy)
    except ValueError as e:
        raise ConfigError(f"unknown k policy: {policy!r}") from e
    if kind is KPolicy.EXPLICIT:
        if k_value is None:
            raise ConfigError("k policy 'explicit' needs a k value")
        return ExplicitK(k_value)
    if k_value is not None:
        raise ConfigError(f"a k value is only accepted with the 'explicit' policy, not {kind.value!r}")
    return MinKineq() if kind is KPolicy.MIN_KINEQ else LambdaSix()


def resolve_k(policy: KPolicyLike, lam: int, k_value: Optional[float] = None) -> float:
    """Deformation parameter for cutoff *lam*; raises KFloorError below the floor."""
    if int(lam) != lam or lam < 1:
        raise ConfigError(f"cutoff must be a positive integer, got {lam!r}")
    k = float(make_policy(policy, k_value)(int(lam)))
    if not math.isfinite(k) or k < k_floor(int(lam)):
        raise KFloorError(int(lam), k)
    _dbg(f"lambda={lam} k={k}")
    return k


# ---------------------------------------------------------------------------
# Run configuration
# ---------------------------------------------------------------------------

class SpaceKind(Enum):
    CIRCLE = "circle"
    SPHERE = "sphere"


class OutputFormat(Enum):
    JSON = "json"
    CSV = "csv"


def _as_enum(enum_cls, value, what: str):
    if isinstance(value, enum_cls):
        return value
    try:
        return enum_cls(value)
    except ValueError as e:
        raise ConfigError(f"invalid {what}: {value!r}") from e


@dataclass(frozen=True)
class RunConfig:
    """Settings for one command-line run. Validated on construction."""
    space: SpaceKind = SpaceKind.CIRCLE
    lambda_min: int = 1
    lambda_max: int = 4
    k_policy: KPolicy = KPolicy.MIN_KINEQ
    k_value: Optional[float] = None
    tol: float = 1e-10
    seed: int = 0
    output_format: OutputFormat = OutputFormat.JSON
    output_path: Optional[str] = None
    nodes_phi: Optional[int] = None
    nodes_theta: Optional[int] = None
    nodes_psi: Optional[int] = None
    samples: int = 1000
    amplitudes_path: Optional[str] = None
    mu: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "space", _as_enum(SpaceKind, self.space, "space"))
        object.__setattr__(self, "k_policy", _as_enum(KPolicy, self.k_policy, "k policy"))
        object.__setattr__(self, "output_format", _as_enum(OutputFormat, self.output_format, "output format"))

        if self.lambda_min < 1 or self.lambda_max < self.lambda_min:
            raise ConfigError(
                f"need 1 <= lambda-min <= lambda-max, got {self.lambda_min}..{self.lambda_max}"
            )
        if not (self.tol > 0.0) or not math.isfinite(self.tol):
            raise ConfigError(f"tol must be positive, got {self.tol}")
        if self.seed < 0:
            raise ConfigError(f"seed must be non-negative, got {self.seed}")
        if self.samples < 1:
            raise ConfigError(f"samples must be positive, got {self.samples}")
        if not math.isfinite(self.mu):
            raise ConfigError(f"mu must be finite, got {self.mu}")
        for name in ("nodes_phi", "nodes_theta", "nodes_psi"):
            n = getattr(self, name)
            if n is not None and n < 1:
                raise ConfigError(f"{name.replace('_', '-')} must be positive, got {n}")

        # Fail early: every cutoff in the range must admit its k.
        for lam in self.lambdas():
            resolve_k(self.k_policy, lam, self.k_value)

    def lambdas(self) -> range:
        return range(self.lambda_min, self.lambda_max + 1)

    def k_for(self, lam: int) -> float:
        return resolve_k(self.k_policy, lam, self.k_value)
