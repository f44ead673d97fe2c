"""Measures on circles internally tangent at 1 and their images on
horizontal lines of the upper half-plane.

A circle |z - r| = 1 - r is mapped by the inverse Cayley transform onto the
line Im z = v with v = r/(1 - r).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .grid import GridFunction, SQRT_2PI, trapezoid
from .halfplane import cayley
from .report import CheckReport
from .weights import WeightFamily, build_weight, log_phi_alpha


@dataclass(frozen=True)
class DiscMeasure:
    a: np.ndarray
    r: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        r = np.asarray(self.r, dtype=float)
        if a.shape != r.shape or a.ndim != 1 or a.size == 0:
            raise ValueError("a and r must be nonempty vectors of equal length")
        if np.any(a <= 0):
            raise ValueError("weights a_n must be positive")
        if np.any((r <= 0) | (r >= 1)):
            raise ValueError("radii must lie in (0, 1)")
        if np.any(np.diff(r) >= 0):
            raise ValueError("radii must be strictly decreasing")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "r", r)


@dataclass(frozen=True)
class LineMeasure:
    a: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        v = np.asarray(self.v, dtype=float)
        if a.shape != v.shape or a.ndim != 1 or a.size == 0:
            raise ValueError("a and v must be nonempty vectors of equal length")
        if np.any(a <= 0) or np.any(v <= 0):
            raise ValueError("a and v must be positive")
        if np.any(np.diff(v) >= 0):
            raise ValueError("heights must be strictly decreasing")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "v", v)

    @classmethod
    def from_family(cls, family: WeightFamily) -> "LineMeasure":
        return cls(family.a, family.v)


def to_halfplane(nu: DiscMeasure) -> LineMeasure:
    return LineMeasure(nu.a, nu.r / (1 - nu.r))


def to_disc(mu: LineMeasure) -> DiscMeasure:
    return DiscMeasure(mu.a, mu.v / (1 + mu.v))


def circle_integral(f: Callable[[np.ndarray], np.ndarray], r: float, n: int = 512) -> complex:
    """(1/2 pi) int over |z - r| = 1 - r of f, arc length measure.

    The periodic trapezoid rule is exact for polynomials of degree < n.
    """
    if not 0 <= r < 1:
        raise ValueError("r must lie in [0, 1)")
    theta = 2 * math.pi * np.arange(n) / n
    z = r + (1 - r) * np.exp(1j * theta)
    return complex((1 - r) * np.mean(f(z)))


@dataclass(frozen=True)
class LineIntegral:
    value: complex
    tail_bound: float


def line_integral(
    f: Callable[[np.ndarray], np.ndarray], r: float, T_factor: float = 1e16, order: int = 256
) -> LineIntegral:
    """(1/pi) int_{-T}^{T} (f o cayley)(t + i v) dt/(t^2 + c^2), c = 1/(1 - r).

    With t = c tan(phi) the integrand becomes bounded and smooth in phi, so
    Gauss-Legendre on [-phi_T, phi_T] converges fast. ``tail_bound`` bounds
    the discarded part |t| > T.
    """
    if not 0 <= r < 1:
        raise ValueError("r must lie in [0, 1)")
    c = 1.0 / (1.0 - r)
    v = r / (1.0 - r)
    T = T_factor * c
    phi_T = math.atan(T / c)
    x, w = np.polynomial.legendre.leggauss(order)
    phi = phi_T * x
    vals = f(cayley(c * np.tan(phi) + 1j * v))
    value = complex(phi_T * np.dot(w, vals) / (math.pi * c))
    sup = float(np.max(np.abs(vals)))
    tail = sup * (2.0 / (math.pi * c)) * math.atan(1.0 / T_factor)
    return LineIntegral(value, tail)


def halfplane_identity_check(
    f: Callable[[np.ndarray], np.ndarray], r: float, tol: float = 1e-6
) -> CheckReport:
    disc = circle_integral(f, r)
    line = line_integral(f, r)
    scale = max(abs(disc), abs(line.value), 1e-300)
    err = abs(disc - line.value)
    if line.tail_bound > tol * scale:
        raise ValueError(f"truncation tail {line.tail_bound:.2e} exceeds the tolerance")
    rel = err / scale
    return CheckReport(
        f"halfplane_identity(r={r:g})",
        passed=rel <= tol,
        lhs=rel,
        rhs=tol,
        margin=tol - rel,
        details={"circle": disc, "line": line.value, "tail_bound": line.tail_bound},
    )


def _check_cell_support(f: GridFunction, alpha: float) -> None:
    t = f.t
    if t[0] < -1e-12 * alpha or t[-1] > alpha * (1 + 1e-12):
        raise ValueError("f must be sampled on [0, alpha]")


def line_values(
    f: GridFunction, n: int, alpha: float, v: np.ndarray, t: np.ndarray
) -> np.ndarray:
    """(theta_alpha^n F^{-1} f)(t + i v_k) for each height v_k and real t.

    Uses the trapezoid rule in s, accurate while |t| stays well below pi/h.
    """
    s = f.t + alpha * n
    w = np.full(f.M, f.h)
    w[[0, -1]] *= 0.5
    damp = np.exp(-np.outer(v, s)) * (w * f.values)[None, :]
    phase = np.exp(1j * np.outer(t, s))
    return (damp @ phase.T) / SQRT_2PI


def gram_block(
    n: int,
    m: int,
    f: GridFunction,
    g: GridFunction,
    family: WeightFamily,
    T: float | None = None,
) -> complex:
    """(theta^n F^{-1} f, theta^m F^{-1} g) in L^2(mu), mu = sum_k a_k dt on Im z = v_k.

    The t-integral runs over [-T, T] with the trapezoid rule at a step that
    resolves every frequency of the integrand.
    """
    alpha = family.alpha
    _check_cell_support(f, alpha)
    _check_cell_support(g, alpha)
    if not math.isclose(f.h, g.h, rel_tol=1e-12):
        raise ValueError("f and g must share the grid step")
    T = 0.4 * math.pi / f.h if T is None else T
    band = (abs(n - m) + 1) * alpha
    dt = 0.5 * math.pi / band
    K = int(math.ceil(T / dt))
    t = dt * np.arange(-K, K + 1)
    F = line_values(f, n, alpha, family.v, t)
    Gv = line_values(g, m, alpha, family.v, t)
    per_line = (F * np.conj(Gv)).sum(axis=1) * dt
    return complex(np.dot(family.a, per_line))


def gram_diagonal_oracle(n: int, f: GridFunction, g: GridFunction, family: WeightFamily) -> complex:
    """Trapezoid value of int_0^alpha f conj(g) phi_{alpha,n} in s."""
    phi = np.exp(log_phi_alpha(family, n, f.t))
    return trapezoid(f.with_values(f.values * np.conj(g.values) * phi))


def check_gram_blocks(
    f: GridFunction,
    family: WeightFamily,
    N: int = 8,
    off_tol: float = 1e-8,
    diag_tol: float = 1e-6,
) -> CheckReport:
    """Orthogonality of the blocks and their diagonal values for n, m < N."""
    G = np.array([[gram_block(n, m, f, f, family) for m in range(N)] for n in range(N)])
    diag = np.real(np.diag(G))
    oracle = np.array([gram_diagonal_oracle(n, f, f, family).real for n in range(N)])
    diag_err = np.abs(diag - oracle) / np.abs(oracle)
    norm = np.sqrt(np.outer(np.abs(diag), np.abs(diag)))
    off = np.abs(G) / norm
    np.fill_diagonal(off, 0.0)
    omega = build_weight(family, N + 1)
    fnorm = trapezoid(f.with_values(np.abs(f.values) ** 2)).real
    lower = fnorm * np.exp(-omega.log_omega2_neg[1:N + 1])
    upper = fnorm * np.exp(-omega.log_omega2_neg[:N])
    sandwich = bool(np.all(lower <= diag * (1 + 1e-10)) and np.all(diag <= upper * (1 + 1e-10)))
    worst_off = np.unravel_index(int(np.argmax(off)), off.shape)
    passed = float(off.max()) <= off_tol and float(diag_err.max()) <= diag_tol and sandwich
    rows = tuple(
        {"n": n, "m": m, "re": float(G[n, m].real), "im": float(G[n, m].imag)}
        for n in range(N) for m in range(N)
    )
    return CheckReport(
        "gram_blocks",
        passed=passed,
        lhs=float(off.max()),
        rhs=off_tol,
        margin=off_tol - float(off.max()),
        witness=tuple(int(i) for i in worst_off),
        details={"max_diag_rel_err": float(diag_err.max()), "sandwich": sandwich, "N": N},
        rows=rows,
    )
