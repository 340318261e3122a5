#!/usr/bin/env -S python3 -u
"""
Special functions for fuzzy-workbench.

Contains:
- pochhammer / factorial_ratio: telescoped products, exact where possible
- hyp2f1_terminating: F(-n, b; c; z) with compensated summation
- JacobiParams / jacobi_poly / jacobi_norm
- product_formula_f / product_formula_g and their factorial closed form
- rotation_element_closed_form: <l,n| e^{i theta L2} |l,h> through Jacobi polynomials
- toeplitz_closed_form: spectrum of tridiagonal Toeplitz matrices
- summation_suite: the finite sums and bounds the localization estimates rest on
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Union

import numpy as np

from numerics import SpectrumReport, spectrum_flags, max_abs

Number = Union[int, float, Fraction]


class PochhammerPoleError(ZeroDivisionError):
    """(c)_m vanishes inside a terminating hypergeometric sum."""

    def __init__(self, m: int, c: Number):
        self.m = m
        self.c = c
        super().__init__(f"(c)_m vanishes at m={m} for c={c}")


class OrderingError(ValueError):
    """Product-formula indices violate l >= s >= h >= -l."""


# ---------------------------------------------------------------------------
# Pochhammer symbols and factorial ratios
# ---------------------------------------------------------------------------

def pochhammer(a: Number, m: int) -> Number:
    """Rising factorial (a)_m = a (a+1) ... (a+m-1)."""
    if m < 0:
        raise ValueError(f"m must be non-negative, got {m}")
    out: Number = 1
    for j in range(m):
        out = out * (a + j)
    return out


def factorial_ratio(a: int, b: int) -> Fraction:
    """a!/b! as an exact fraction, by telescoping."""
    if a < 0 or b < 0:
        raise ValueError(f"factorials of negative integers: {a}, {b}")
    if a >= b:
        return Fraction(math.prod(range(b + 1, a + 1)))
    return Fraction(1, math.prod(range(a + 1, b + 1)))


# ---------------------------------------------------------------------------
# Terminating Gauss hypergeometric series
# ---------------------------------------------------------------------------

def hyp2f1_terminating(n: int, b: float, c: float, z: float) -> float:
    """
    F(-n, b; c; z) = sum_{m=0}^{n} C(n,m) (-1)^m z^m (b)_m / (c)_m.

    Terms are built by their ratio and added with Kahan compensation.
    Raises PochhammerPoleError when (c)_m hits zero.
    """
    if int(n) != n or n < 0:
        raise ValueError(f"n must be a non-negative integer, got {n!r}")
    n = int(n)
    total = 1.0
    comp = 0.0
    term = 1.0
    for m in range(1, n + 1):
        if c + m - 1 == 0:
            raise PochhammerPoleError(m, c)
        term *= (-n + m - 1) * (b + m - 1) / ((c + m - 1) * m) * z
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total


# ---------------------------------------------------------------------------
# Jacobi polynomials
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class JacobiParams:
    n: int
    alpha: int
    beta: int
    x: float

    def __post_init__(self) -> None:
        for name in ("n", "alpha", "beta"):
            v = getattr(self, name)
            if int(v) != v or v < 0:
                raise ValueError(f"{name} must be a non-negative integer, got {v!r}")
        if not -1.0 <= self.x <= 1.0:
            raise ValueError(f"x must lie in [-1, 1], got {self.x!r}")


def jacobi_poly(p: JacobiParams) -> float:
    """P_n^{(alpha, beta)}(x) by the three-term recurrence in n."""
    n, a, b, x = p.n, p.alpha, p.beta, float(p.x)
    p_prev = 1.0
    if n == 0:
        return p_prev
    p_cur = (a + 1) + (a + b + 2) * (x - 1.0) / 2.0
    for j in range(2, n + 1):
        s = 2 * j + a + b
        c1 = 2 * j * (j + a + b) * (s - 2)
        c2 = (s - 1) * (s * (s - 2) * x + a * a - b * b)
        c3 = 2 * (j + a - 1) * (j + b - 1) * s
        p_prev, p_cur = p_cur, (c2 * p_cur - c3 * p_prev) / c1
    return p_cur


def jacobi_norm(n: int, alpha: int, beta: int) -> float:
    """Integral of (1-x)^alpha (1+x)^beta [P_n^{(alpha,beta)}]^2 over [-1, 1]."""
    ratio = factorial_ratio(n + alpha, n) * factorial_ratio(n + beta, n + alpha + beta)
    return float(Fraction(2) ** (alpha + beta + 1) / (2 * n + alpha + beta + 1) * ratio)


# ---------------------------------------------------------------------------
# Product formulas
# ---------------------------------------------------------------------------

def _check_order(l: int, h: int, s: int) -> None:
    if not (l >= s >= h >= -l):
        raise OrderingError(f"need l >= s >= h >= -l, got l={l}, s={s}, h={h}")


def product_formula_f(l: int, h: int, s: int) -> int:
    """prod_{j=h}^{s-1} [l(l+1) - j(j+1)]."""
    _check_order(l, h, s)
    return math.prod(l * (l + 1) - j * (j + 1) for j in range(h, s))


def product_formula_g(l: int, h: int, s: int) -> int:
    """prod_{j=h+1}^{s} [l(l+1) - j(j-1)]."""
    _check_order(l, h, s)
    return math.prod(l * (l + 1) - j * (j - 1) for j in range(h + 1, s + 1))


def product_formula_f_closed(l: int, h: int, s: int) -> Fraction:
    """(l-h)! (l+s)! / ((l+h)! (l-s)!)."""
    _check_order(l, h, s)
    return factorial_ratio(l - h, l - s) * factorial_ratio(l + s, l + h)


def rotation_element_closed_form(l: int, n: int, h: int, theta: float) -> float:
    """
    <l,n| e^{i theta L2} |l,h> for 0 <= n <= h <= l:

        (-1)^{h-n} cos^{n+h}(theta/2) sin^{h-n}(theta/2)
        * sqrt((l-h)! (l+h)! / ((l+n)! (l-n)!)) * P_{l-h}^{(h-n, h+n)}(cos theta)
    """
    if not (0 <= n <= h <= l):
        raise OrderingError(f"need 0 <= n <= h <= l, got n={n}, h={h}, l={l}")
    ratio = factorial_ratio(l - h, l - n) * factorial_ratio(l + h, l + n)
    jac = jacobi_poly(JacobiParams(l - h, h - n, h + n, max(-1.0, min(1.0, math.cos(theta)))))
    sign = -1.0 if (h - n) % 2 else 1.0
    return (sign * math.cos(theta / 2) ** (n + h) * math.sin(theta / 2) ** (h - n)
            * math.sqrt(float(ratio)) * jac)


# ---------------------------------------------------------------------------
# Tridiagonal Toeplitz spectra
# ---------------------------------------------------------------------------

def toeplitz_closed_form(n: int, a: complex, b: complex, c: complex) -> SpectrumReport:
    """
    Closed-form eigenpairs of P_n(a, b, c): diagonal a, superdiagonal b,
    subdiagonal c.

    lambda_h = a + 2 sqrt(bc) cos(h pi/(n+1)) and
    chi^{h}_k = (c/b)^{k/2} sin(h k pi/(n+1)), h, k = 1..n.
    With r = sqrt(c/b) the factor sqrt(bc) is taken as b r so that one
    branch serves both formulas.
    """
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    if b == 0 or c == 0:
        raise ValueError("b and c must be non-zero")
    n = int(n)
    r = np.sqrt(complex(c) / complex(b))
    root = complex(b) * r
    h = np.arange(1, n + 1)
    k = np.arange(1, n + 1)
    values = a + 2.0 * root * np.cos(h * np.pi / (n + 1))
    raw = (r ** k)[:, None] * np.sin(np.outer(k, h) * np.pi / (n + 1))

    complex_spectrum = bool(np.max(np.abs(np.imag(values))) > 0.0)
    vecs = raw / np.linalg.norm(raw, axis=0)
    order = np.argsort(-np.real(values), kind="stable")
    values, vecs = values[order], vecs[:, order]

    dense = a * np.eye(n, dtype=complex) + b * np.eye(n, k=1) + c * np.eye(n, k=-1)
    residual = max_abs(np.linalg.norm(dense @ vecs - vecs * values, axis=0))
    if not complex_spectrum:
        values = np.real(values)
    flags = spectrum_flags(np.real(values), max(abs(a), abs(b), abs(c)))
    flags["complex_spectrum"] = complex_spectrum
    if b == c:
        norm1 = float(np.sum(np.abs(raw[:, 0]) ** 2))
        flags["norm_identity"] = abs(norm1 - (n + 1) / 2.0) <= 1e-12 * (n + 1)
    return SpectrumReport(values, vecs, residual, flags)


# ---------------------------------------------------------------------------
# Summation identities
# ---------------------------------------------------------------------------

def _rising(h: int, j: int) -> int:
    return math.prod(h + i for i in range(j + 1))


def _b(m: int, k: float) -> float:
    return math.sqrt(1.0 + m * (m - 1) / k)


def summation_suite(n_max: int, theta_samples: int = 64) -> Dict[str, float]:
    """
    Check the finite sums and bounds behind the localization estimates for
    every n = 2..n_max. Returns identity name -> worst residual (0 is exact).

    Rational identities are checked in exact arithmetic; trigonometric ones
    in floating point. *theta_samples* points sample the bracket
    1 + x/2 >= sqrt(1+x) >= 1 + x/2 - x^2/8 that gives the b_m bounds.
    """
    if n_max < 2:
        raise ValueError(f"n_max must be at least 2, got {n_max}")
    if theta_samples < 2:
        raise ValueError(f"theta_samples must be at least 2, got {theta_samples}")
    out: Dict[str, float] = {}

    def record(name: str, residual: float) -> None:
        out[name] = max(out.get(name, 0.0), float(residual))

    for n in range(2, n_max + 1):
        hs = range(1, n + 1)
        for j in range(4):
            lhs = sum(_rising(h, j) for h in hs)
            rhs = Fraction(math.prod(n + i for i in range(j + 2)), j + 2)
            record(f"rising_product_sum_j{j}", abs(lhs - rhs))
        record("sum_h2", abs(sum(h * h for h in hs) - Fraction(n * (n + 1) * (2 * n + 1), 6)))
        record("sum_h3", abs(sum(h ** 3 for h in hs) - Fraction(n * n * (n + 1) ** 2, 4)))
        record("sum_h_2h1", abs(sum(h * (2 * h + 1) for h in hs) - Fraction(4 * n ** 3 + 9 * n ** 2 + 5 * n, 6)))
        record("sum_hh1_2h1", abs(sum(h * (h + 1) * (2 * h + 1) for h in hs)
                                  - Fraction(n * (n + 1) ** 2 * (n + 2), 2)))
        # holds with the h = 0 term included
        record("sum_hh1p1_2h1", abs(sum((h * (h + 1) + 1) * (2 * h + 1) for h in range(n + 1))
                                    - Fraction((n + 1) ** 2 * (n * n + 2 * n + 2), 2)))
        record("sum_h_half", abs(sum(h * (1 - Fraction(1, 2 * h)) for h in hs) - Fraction(n * n, 2)))

        k = float(n * n * (n + 1) ** 2)
        for m in hs:
            upper = 1.0 + m * (m - 1) / (2 * k)
            lower = upper - (m * (m - 1)) ** 2 / (2 * k) ** 2
            bm = _b(m, k)
            record("b_m_upper", max(0.0, bm - upper))
            record("b_m_lower", max(0.0, lower - bm))
        total = sum(_b(m, k) for m in hs)
        cube = (n - 1) * n * (n + 1)
        record("sum_b_upper", max(0.0, total - (n + cube / (6 * k))))
        record("sum_b_lower", max(0.0, n + cube / (6 * k) - cube * (3 * n * n - 2) / (60 * k * k) - total))

        arg = np.pi / (2 * n + 2)
        record("cos_cancellation", abs(sum(math.cos(arg * (2 * m - 1)) for m in range(2, n + 1))))
        for m in hs:
            lhs = 2.0 * math.sin(arg * (n + 1 + m)) * math.sin(arg * (n + m))
            rhs = math.cos(arg) + math.cos(arg * (2 * m - 1))
            record("sin_product_to_cos_sum", abs(lhs - rhs))

    # upper bound holds on [-1, 8], the lower one on [0, 8]
    xs = np.linspace(-1.0, 8.0, theta_samples)
    root = np.sqrt(1.0 + xs)
    record("sqrt_upper_bracket", max(0.0, float(np.max(root - (1.0 + xs / 2)))))
    xs = np.linspace(0.0, 8.0, theta_samples)
    root = np.sqrt(1.0 + xs)
    record("sqrt_lower_bracket", max(0.0, float(np.max((1.0 + xs / 2 - xs * xs / 8) - root))))
    return out
