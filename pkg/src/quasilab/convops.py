"""Convolution operators (C_psi f)(t) = int f(t - s) psi(s) ds on grids,
their norms on weighted spaces, and the principal-value split

    A_psi f = A_1 f + C_{psi_2} f - c_psi f.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate, signal, special

from . import grid as G
from .grid import GridFunction, SQRT_2PI
from .halfplane import dini_integral
from .report import CheckReport
from .weights import StepWeight, WeightSequence, step_submult_ratio

MAX_DENSE = 4096


class WindowOverflowWarning(RuntimeWarning):
    """Part of a convolution fell outside the output window."""


@dataclass(frozen=True)
class Kernel:
    samples: GridFunction
    support_radius: float | None = None
    decay: str = "unknown"

    def __post_init__(self):
        self.samples.offset  # raises unless t0 is a multiple of h

    @property
    def h(self) -> float:
        return self.samples.h

    def at_offsets(self, d: np.ndarray) -> np.ndarray:
        """psi(d h) for integer offsets d, zero outside the sampled window."""
        idx = np.asarray(d) - self.samples.offset
        inside = (idx >= 0) & (idx < self.samples.M)
        return np.where(inside, self.samples.values[np.clip(idx, 0, self.samples.M - 1)], 0)

    def l1(self) -> float:
        return float(np.sum(np.abs(self.samples.values)) * self.h)


def kernel_from_function(
    fn: Callable[[np.ndarray], np.ndarray],
    h: float,
    M: int,
    support_radius: float | None = None,
    decay: str = "unknown",
) -> Kernel:
    return Kernel(G.sample(fn, h, M), support_radius, decay)


def delta_kernel(h: float, scale: complex = 1.0, M: int = 3) -> Kernel:
    vals = np.zeros(M, dtype=complex)
    vals[M // 2] = scale / h
    return Kernel(GridFunction(G.centered_origin(M, h), h, vals), 0.0, "compact")


def symbol_kernel(symbol: GridFunction) -> Kernel:
    """The kernel F(Psi) from samples of Psi on a frequency grid."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", G.EdgeMassWarning)  # symbols need not decay
        return Kernel(G.transform(symbol), None, "from-symbol")


def convolve(
    kernel: Kernel, f: GridFunction, method: str = "fft", return_overflow: bool = False
):
    """Quadrature of int f(t - s) psi(s) ds on the grid of f."""
    if not math.isclose(kernel.h, f.h, rel_tol=1e-12):
        raise ValueError("kernel and function must share the grid step")
    q = kernel.samples.offset
    if method == "fft":
        full = signal.fftconvolve(f.values, kernel.samples.values)
    elif method == "direct":
        full = np.convolve(f.values, kernel.samples.values)
    else:
        raise ValueError(f"unknown method {method!r}")
    k = np.arange(f.M) - q
    inside = (k >= 0) & (k < full.size)
    out = np.zeros(f.M, dtype=complex)
    out[inside] = f.h * full[k[inside]]
    kept = np.zeros(full.size, dtype=bool)
    kept[k[inside]] = True
    total = float(np.sum(np.abs(full) ** 2))
    lost = float(np.sum(np.abs(full[~kept]) ** 2))
    overflow = math.sqrt(lost / total) if total > 0 else 0.0
    if overflow > 1e-10:
        warnings.warn(f"convolution overflow fraction {overflow:.2e}", WindowOverflowWarning, stacklevel=2)
    result = f.with_values(out)
    return (result, overflow) if return_overflow else result


@dataclass(frozen=True)
class OpNormEstimate:
    value: float
    converged: bool
    iterations: int


def _weighted_matrix(kernel: Kernel, w: StepWeight, t0: float, h: float, M: int) -> np.ndarray:
    if M > MAX_DENSE:
        raise ValueError(f"window of {M} points exceeds the dense limit {MAX_DENSE}")
    if not math.isclose(kernel.h, h, rel_tol=1e-12):
        raise ValueError("kernel and window must share the grid step")
    probe = GridFunction(t0, h, np.zeros(M))
    lw = w.log_cell(G.cell_index(probe, w.alpha))
    i = np.arange(M)
    toeplitz = kernel.at_offsets(i[:, None] - i[None, :])
    return h * toeplitz * np.exp(0.5 * (lw[:, None] - lw[None, :]))


def weighted_opnorm_estimate(
    kernel: Kernel,
    w: StepWeight,
    window: tuple[float, float, int],
    iters: int = 200,
    seed: int = 0,
    tol: float = 1e-8,
) -> OpNormEstimate:
    """Power iteration for ||sqrt(w) C_psi sqrt(w)^{-1}|| on the window (t0, h, M).

    The conjugated matrix entries are formed directly so no large weight
    ratio ever multiplies a rounding error.
    """
    t0, h, M = window
    A = _weighted_matrix(kernel, w, t0, h, M)
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(M) + 1j * rng.standard_normal(M)
    v /= np.linalg.norm(v)
    sigma = 0.0
    for it in range(1, iters + 1):
        u = A @ v
        new = float(np.linalg.norm(u))
        if new == 0.0:
            return OpNormEstimate(0.0, True, it)
        v = A.conj().T @ u
        v /= np.linalg.norm(v)
        if abs(new - sigma) <= tol * new:
            return OpNormEstimate(new, True, it)
        sigma = new
    return OpNormEstimate(sigma, False, iters)


def check_young_bound(
    kernel: Kernel,
    w: StepWeight,
    C: float,
    window: tuple[float, float, int],
    rtol: float = 1e-6,
    vacuous_fraction: float = 1e-3,
    **power_kw,
) -> CheckReport:
    """Power-iteration norm versus sqrt(C) ||psi sqrt(w)||_1 on the window."""
    pre = step_submult_ratio(w, C, "weight_submultiplicativity")
    if not pre.passed:
        raise ValueError(f"w(t+s) <= C w(t) w(s) fails (ratio {pre.lhs:.6g} at cells {pre.witness})")
    t0, h, M = window
    d = np.arange(-(M - 1), M)
    probe = GridFunction(d[0] * h, h, np.zeros(d.size))
    lw = w.log_cell(G.cell_index(probe, w.alpha))
    mass = np.abs(kernel.at_offsets(d)) * np.exp(0.5 * lw) * h
    l1 = math.fsum(mass)
    outer = math.fsum(mass[np.abs(d) > (M - 1) // 2])
    vacuous = l1 > 0 and outer > vacuous_fraction * l1
    bound = math.sqrt(C) * l1
    est = weighted_opnorm_estimate(kernel, w, window, **power_kw)
    tol = rtol * max(bound, 1e-300)
    return CheckReport(
        "young_bound",
        passed=est.value <= bound + tol,
        lhs=est.value,
        rhs=bound,
        margin=bound - est.value,
        details={"converged": est.converged, "iterations": est.iterations,
                 "vacuous": vacuous, "outer_fraction": outer / l1 if l1 else 0.0,
                 "window": [t0, h, M]},
    )


def symbol_sup(kernel: Kernel, n: int = 1 << 16) -> float:
    """sup_theta |sum_d h psi_d e^{i d theta}|, the norm of the discrete
    Toeplitz operator on l^2(Z)."""
    vals = kernel.samples.values * kernel.h
    n = max(n, 4 * vals.size)
    return float(np.max(np.abs(np.fft.fft(vals, n))))


def banded_weighted_bound(
    kernel: Kernel,
    omega: WeightSequence,
    window: tuple[float, float, int],
    **power_kw,
) -> CheckReport:
    """Weighted norm of a band-limited convolution against
    3 ||B||^2 (1 + sup omega^2(n)/omega^2(n+1) + sup omega^2(n)/omega^2(n-1))."""
    delta = kernel.support_radius
    if delta is None or delta >= omega.alpha:
        raise ValueError("banded bound needs a kernel supported in [-delta, delta] with delta < alpha")
    N = omega.N
    n = np.arange(-N, N)
    L = omega.log_omega2
    r_plus = math.exp(float(np.max(L(n) - L(n + 1))))
    r_minus = math.exp(float(np.max(L(n + 1) - L(n))))
    b = symbol_sup(kernel)
    bound_sq = 3 * b**2 * (1 + r_plus + r_minus)
    w = StepWeight.from_weight(omega)
    est = weighted_opnorm_estimate(kernel, w, window, **power_kw)
    return CheckReport(
        "banded_weighted_bound",
        passed=est.value**2 <= bound_sq * (1 + 1e-9),
        lhs=est.value**2,
        rhs=bound_sq,
        margin=bound_sq - est.value**2,
        details={"delta": delta, "B_norm": b, "r_plus": r_plus, "r_minus": r_minus,
                 "estimate": est.value, "converged": est.converged,
                 "ratio": bound_sq / est.value**2 if est.value else math.inf},
    )


@dataclass(frozen=True)
class SingularSplit:
    delta: float
    psi: Kernel
    psi2: Kernel
    c_psi: complex
    dini: float
    psi_fn: Callable[[np.ndarray], np.ndarray] | None = None
    c_psi_grid: complex = 0j

    @property
    def p(self) -> int:
        return int(round(self.delta / self.psi.h))


def _quad_complex(fn, a, b) -> complex:
    re = integrate.quad(lambda x: complex(fn(np.array([x]))[0]).real, a, b, limit=400, epsabs=1e-14, epsrel=1e-13)[0]
    im = integrate.quad(lambda x: complex(fn(np.array([x]))[0]).imag, a, b, limit=400, epsabs=1e-14, epsrel=1e-13)[0]
    return complex(re, im)


def make_singular_split(
    psi: Kernel, delta: float, psi_fn: Callable[[np.ndarray], np.ndarray] | None = None
) -> SingularSplit:
    """Split psi at radius delta.

    With a closed form ``psi_fn`` the constant c_psi is the integral of psi_2
    by adaptive quadrature; otherwise it is the grid sum of psi_2.
    """
    dini = dini_integral(psi.samples, delta)
    if not math.isfinite(dini):
        raise ValueError("Dini condition fails at 0")
    s = psi.samples.t
    h = psi.h
    p = int(round(delta / h))
    d = np.arange(psi.samples.M) + psi.samples.offset
    vals = np.zeros(psi.samples.M, dtype=complex)
    outside = np.abs(d) > p
    vals[outside] = psi.samples.values[outside] / s[outside]
    edge = np.abs(d) == p  # jump of the cut-off: half value, as in the trapezoid rule
    vals[edge] = 0.5 * psi.samples.values[edge] / s[edge]
    psi2 = Kernel(psi.samples.with_values(vals), None, psi.decay)
    c_grid = complex(math.fsum(vals.real) * h, math.fsum(vals.imag) * h)
    c = c_grid
    if psi_fn is not None:
        c = _quad_complex(lambda x: psi_fn(x) / x, delta, np.inf) + _quad_complex(
            lambda x: psi_fn(-x) / -x, delta, np.inf)
    return SingularSplit(delta, psi, psi2, c, dini, psi_fn, c_grid)


def _a1_weights(split: SingularSplit) -> tuple[np.ndarray, np.ndarray]:
    """Offsets m != 0 in [-p, p] and the trapezoid weights w_m psi_m / s_m."""
    h, p = split.psi.h, split.p
    m = np.concatenate([np.arange(-p, 0), np.arange(1, p + 1)])
    w = np.full(m.size, h)
    w[np.abs(m) == p] *= 0.5
    return m, w * split.psi.at_offsets(m) / (m * h)


def apply_A1(split: SingularSplit, f: GridFunction) -> GridFunction:
    """int_{-delta}^{delta} psi(s) (f(t-s) - f(t))/s ds, central difference at s = 0."""
    if not math.isclose(split.psi.h, f.h, rel_tol=1e-12):
        raise ValueError("kernel and function must share the grid step")
    v = f.values
    out = np.zeros_like(v)
    m, coef = _a1_weights(split)
    for mi, ci in zip(m, coef):
        out += ci * (G.shift_samples(v, int(mi)) - v)
    psi0 = split.psi.at_offsets(np.array([0]))[0]
    deriv = (G.shift_samples(v, -1) - G.shift_samples(v, 1)) / (2 * f.h)
    out += f.h * psi0 * (-deriv)
    return f.with_values(out)


def psi1_discrete(split: SingularSplit, xi: np.ndarray) -> np.ndarray:
    """Symbol of apply_A1: the same nodes with e^{i xi s} in place of shifts."""
    h = split.psi.h
    m, coef = _a1_weights(split)
    s = m * h
    out = np.zeros(xi.size, dtype=complex)
    for si, ci in zip(s, coef):
        out += ci * np.expm1(1j * xi * si)
    psi0 = split.psi.at_offsets(np.array([0]))[0]
    return out + psi0 * 1j * np.sin(xi * h)


def _panel_nodes(delta: float, width: float, order: int = 20, grading: int = 40):
    """Gauss-Legendre nodes on (0, delta], geometrically graded towards 0."""
    x, w = np.polynomial.legendre.leggauss(order)
    n_uniform = max(1, math.ceil(delta / width))
    edges = np.linspace(0.0, delta, n_uniform + 1)
    first = edges[1]
    edges = np.concatenate([[0.0], first * 2.0 ** -np.arange(grading, 0, -1), edges[1:]])
    a, b = edges[:-1, None], edges[1:, None]
    return (a + (b - a) * (x + 1) / 2).ravel(), ((b - a) / 2 * w).ravel()


def psi1(split: SingularSplit, xi: np.ndarray, chunk: int = 2048) -> np.ndarray:
    """int_{-delta}^{delta} (e^{i xi s} - 1)/s psi(s) ds by panel quadrature."""
    if split.psi_fn is None:
        return psi1_discrete(split, xi)
    xi = np.asarray(xi, dtype=float)
    xmax = float(np.max(np.abs(xi))) if xi.size else 0.0
    s, w = _panel_nodes(split.delta, min(split.delta / 4, 4 * math.pi / max(xmax, 1e-300)))
    s = np.concatenate([s, -s])
    w = np.concatenate([w, w]) * split.psi_fn(s) / s
    out = np.empty(xi.size, dtype=complex)
    for k in range(0, xi.size, chunk):
        out[k:k + chunk] = np.expm1(1j * np.outer(xi[k:k + chunk], s)) @ w
    return out


def _rel_l2(a: np.ndarray, b: np.ndarray) -> float:
    nb = float(np.linalg.norm(b))
    diff = float(np.linalg.norm(a - b))
    return diff / nb if nb > 0 else diff


def check_multiplier_identity(
    split: SingularSplit, f: GridFunction, tol: float = 1e-3, cutoff: float = 1e-15
) -> CheckReport:
    """F^{-1}(A_1 f) against psi_1 F^{-1} f on the frequency grid.

    psi_1 is computed independently of the grid (see :func:`psi1`) at the
    frequencies where F^{-1} f exceeds ``cutoff`` times its maximum.
    """
    lhs = G.inverse_transform(apply_A1(split, f))
    fhat = G.inverse_transform(f)
    mag = np.abs(fhat.values)
    keep = mag > cutoff * mag.max() if mag.max() > 0 else np.zeros(mag.size, dtype=bool)
    p1 = np.zeros(fhat.M, dtype=complex)
    p1[keep] = psi1(split, fhat.t[keep])
    rhs = p1 * fhat.values
    disc = _rel_l2(lhs.values, rhs)
    psi0 = abs(split.psi.at_offsets(np.array([0]))[0])
    sup_bound = 2 * split.dini + 2 * psi0 * float(special.sici(math.pi)[0])
    sup_p1 = float(np.max(np.abs(psi1_discrete(split, fhat.t))))
    bounded = sup_p1 <= sup_bound * (1 + 1e-6) + 1e-12
    return CheckReport(
        "multiplier_identity",
        passed=disc <= tol and bounded,
        lhs=disc,
        rhs=tol,
        margin=tol - disc,
        details={"sup_psi1": sup_p1, "sup_bound": sup_bound, "h": f.h, "delta": split.delta,
                 "psi1_at_0": complex(psi1(split, np.zeros(1))[0])},
    )


def check_support_dilation(split: SingularSplit, f: GridFunction, threshold: float = 0.0) -> CheckReport:
    """A_1 f vanishes outside the support of f dilated by delta."""
    nz = np.flatnonzero(np.abs(f.values) > threshold)
    out = apply_A1(split, f)
    if nz.size == 0:
        leak = float(np.max(np.abs(out.values)))
        b1 = b2 = float("nan")
    else:
        t = f.t
        b1, b2 = t[nz[0]], t[nz[-1]]
        outside = (t < b1 - split.delta - 1e-9 * f.h) | (t > b2 + split.delta + 1e-9 * f.h)
        leak = float(np.max(np.abs(out.values[outside]), initial=0.0))
    scale = max(float(np.max(np.abs(out.values))), 1e-300)
    return CheckReport(
        "support_dilation",
        passed=leak <= 1e-12 * scale,
        lhs=leak,
        rhs=1e-12 * scale,
        margin=1e-12 * scale - leak,
        details={"support": [b1, b2], "delta": split.delta},
    )


def apply_A(split: SingularSplit, f: GridFunction) -> GridFunction:
    """A_1 f + C_{psi_2} f - c_psi f."""
    conv = convolve(split.psi2, f)
    return f.with_values(apply_A1(split, f).values + conv.values - split.c_psi * f.values)


def multiplier_route(symbol: Callable[[np.ndarray], np.ndarray], f: GridFunction) -> GridFunction:
    """F(Psi F^{-1} f) returned on the grid of f."""
    fhat = G.inverse_transform(f)
    return G.transform(fhat.with_values(symbol(fhat.t) * fhat.values), origin=f.t0)


def check_assembly_identity(
    symbol: Callable[[np.ndarray], np.ndarray],
    split: SingularSplit,
    psi_at_zero: complex,
    f: GridFunction,
    tol: float = 1e-3,
) -> CheckReport:
    """A_psi f against i C_{F Psi} f - i sqrt(2 pi) Psi(0) f for psi = F Psi'.

    The right side is realised through the multiplier identity, since
    F Psi is a distribution when Psi does not decay.
    """
    lhs = apply_A(split, f)
    rhs = multiplier_route(lambda xi: symbol(xi) - psi_at_zero, f)
    rhs_vals = 1j * SQRT_2PI * rhs.values
    disc = _rel_l2(lhs.values, rhs_vals)
    return CheckReport(
        "assembly_identity",
        passed=disc <= tol,
        lhs=disc,
        rhs=tol,
        margin=tol - disc,
        details={"h": f.h, "delta": split.delta, "c_psi": split.c_psi,
                 "psi_l1": split.psi.l1()},
    )


def mult_conv_duality_check(symbol: GridFunction, f: GridFunction, tol: float = 1e-10) -> CheckReport:
    """F M_Psi F^{-1} f against (2 pi)^{-1/2} C_{F Psi} f."""
    fhat = G.inverse_transform(f)
    if not (math.isclose(symbol.h, fhat.h, rel_tol=1e-12) and symbol.M == fhat.M
            and abs(symbol.t0 - fhat.t0) <= 1e-9 * fhat.h):
        raise ValueError("symbol must be sampled on the frequency grid dual to f")
    lhs = G.transform(fhat.with_values(symbol.values * fhat.values), origin=f.t0)
    rhs = convolve(symbol_kernel(symbol), f).values / SQRT_2PI
    err = float(np.max(np.abs(lhs.values - rhs)))
    scale = max(float(np.max(np.abs(rhs))), 1e-300)
    return CheckReport(
        "mult_conv_duality",
        passed=err <= tol * scale,
        lhs=err,
        rhs=tol * scale,
        margin=tol * scale - err,
        details={"relative_l2": _rel_l2(lhs.values, rhs)},
    )
