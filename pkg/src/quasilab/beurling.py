"""Rectangle norms of analytic functions and the lower-bound chain used in
the quasianalyticity criterion."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .grid import GridFunction, SQRT_2PI, trapezoid
from .report import CheckReport
from .weights import WeightFamily, build_weight, quasi_partial_sums


@dataclass(frozen=True)
class RectangleSpec:
    b1: float
    b2: float
    c: float

    def __post_init__(self):
        if not self.b1 < self.b2:
            raise ValueError("need b1 < b2")
        if not self.c > 0:
            raise ValueError("height c must be positive")

    @property
    def width(self) -> float:
        return self.b2 - self.b1


def _y_samples(rect: RectangleSpec, count: int) -> np.ndarray:
    # include both edges: the sup over the open interval is approached there
    return np.linspace(0.0, rect.c, count)


def varsigma_estimate(
    f: Callable[[np.ndarray], np.ndarray],
    rect: RectangleSpec,
    y: np.ndarray | None = None,
    order: int = 128,
) -> float:
    """max over sampled y of (int_{b1}^{b2} |f(t + i y)|^2 dt)^{1/2}."""
    y = _y_samples(rect, 33) if y is None else np.asarray(y, dtype=float)
    x, w = np.polynomial.legendre.leggauss(order)
    t = 0.5 * (rect.b1 + rect.b2) + 0.5 * rect.width * x
    w = 0.5 * rect.width * w
    z = t[None, :] + 1j * y[:, None]
    slices = (np.abs(f(z)) ** 2) @ w
    return math.sqrt(float(slices.max()))


def block_function(g: GridFunction, n: int, alpha: float) -> Callable[[np.ndarray], np.ndarray]:
    """z -> (theta_alpha^n F^{-1} g)(-z) = (2 pi)^{-1/2} e^{-i alpha n z} int_0^alpha e^{-i z s} g(s) ds."""
    s = g.t
    w = np.full(g.M, g.h)
    w[[0, -1]] *= 0.5
    wg = w * g.values

    def fn(z):
        z = np.asarray(z, dtype=complex)
        flat = z.ravel()
        vals = np.exp(-1j * np.outer(flat, s)) @ wg
        return (np.exp(-1j * alpha * n * flat) * vals / SQRT_2PI).reshape(z.shape)

    return fn


def tail_bound_check(
    g: GridFunction, n: int, alpha: float, rect: RectangleSpec, y_count: int = 33
) -> CheckReport:
    """varsigma(f_1n)^2 <= e^{2 c (n+1) alpha} (b2 - b1) alpha ||g||^2 / (2 pi)."""
    if rect.c >= 1.0 / alpha:
        raise ValueError("the height c must satisfy c < 1/alpha")
    t = g.t
    if t[0] < -1e-12 * alpha or t[-1] > alpha * (1 + 1e-12):
        raise ValueError("g must be sampled on [0, alpha]")
    fn = block_function(g, n, alpha)
    sig = varsigma_estimate(fn, rect, _y_samples(rect, y_count))
    gnorm2 = trapezoid(g.with_values(np.abs(g.values) ** 2)).real
    bound = math.exp(2 * rect.c * (n + 1) * alpha) * rect.width * alpha * gnorm2 / (2 * math.pi)
    lhs = sig**2
    return CheckReport(
        f"tail_bound(n={n},c={rect.c:g})",
        passed=lhs <= bound * (1 + 1e-12),
        lhs=lhs,
        rhs=bound,
        margin=bound - lhs,
        details={"ratio": lhs / bound if bound > 0 else 0.0, "rect": [rect.b1, rect.b2, rect.c]},
    )


def m_lower_bound(family: WeightFamily, C1g: float, n: int) -> float:
    """log omega(-n-2) - log C1g."""
    if not C1g > 0:
        raise ValueError("C1g must be positive")
    if n < 0:
        raise ValueError("n must be nonnegative")
    omega = build_weight(family, n + 2)
    return float(omega.log_omega(np.array([-n - 2]))[0]) - math.log(C1g)


def m_lower_bound_table(family: WeightFamily, C1g: float, N: int) -> CheckReport:
    """Bounds for n < N, their monotonicity, and sum bound/(n+1)^2 beside the
    partial sums of sum log omega(-n-1)/(n+1)^2."""
    if not C1g > 0:
        raise ValueError("C1g must be positive")
    omega = build_weight(family, N + 1)
    n = np.arange(N)
    bounds = omega.log_omega(-n - 2) - math.log(C1g)
    series = np.cumsum(bounds / (n + 1) ** 2)
    quasi = quasi_partial_sums(omega, N)
    monotone = bool(np.all(np.diff(bounds) >= -1e-12))
    rows = tuple(
        {"n": int(k), "bound": float(b), "bound_series": float(s), "quasi_partial_sum": float(q)}
        for k, b, s, q in zip(n, bounds, series, quasi)
    )
    return CheckReport(
        "m_lower_bound",
        passed=monotone,
        lhs=float(bounds[-1]),
        rhs=float(bounds[0]),
        margin=float(np.min(np.diff(bounds))) if N > 1 else 0.0,
        details={"C1g": C1g, "N": N, "series_last": float(series[-1]), "quasi_last": float(quasi[-1])},
        rows=rows,
    )
