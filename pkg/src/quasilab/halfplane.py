"""Conformal maps and symbols on the upper half-plane.

Branch convention: ``sqrt_branch(w) = sqrt(r) e^{i theta/2}`` with
``w = r e^{i theta}``, ``theta`` in (0, 2 pi), so the image lies in the upper
half-plane and the cut is [0, +inf).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import special

from .grid import GridFunction, trapezoid
from .report import CheckReport

SYMBOLS = ("cayley", "sqrt", "psi", "psi_lambda", "theta", "vartheta")


def cayley(z):
    z = np.asarray(z, dtype=complex)
    if np.any(z == -1j):
        raise ValueError("cayley map has a pole at z = -i")
    return (z - 1j) / (z + 1j)


def sqrt_branch(w):
    w = np.asarray(w, dtype=complex)
    if np.any((w.imag == 0) & (w.real >= 0)):
        raise ValueError("argument lies on the branch cut [0, +inf)")
    # i*sqrt(-w) with the principal root has argument in (0, pi) and squares to w
    return 1j * np.sqrt(-w)


def _check_psi_domain(z: np.ndarray) -> None:
    if np.any((z.real == 0) & (np.abs(z.imag) >= 1)):
        raise ValueError("Psi is singular on {iy : |y| >= 1}")


@dataclass(frozen=True)
class SymbolKind:
    name: str
    derivative: bool = False
    alpha: float | None = None
    lam: complex | None = None

    def __post_init__(self):
        if self.name not in SYMBOLS:
            raise ValueError(f"unknown symbol {self.name!r}; expected one of {SYMBOLS}")
        if self.name in ("theta", "vartheta") and not (self.alpha and self.alpha > 0):
            raise ValueError(f"{self.name} needs alpha > 0")
        if self.name == "psi_lambda":
            if self.lam is None or not complex(self.lam).imag < 0:
                raise ValueError("psi_lambda needs Im(lambda) < 0")


def _psi(z):
    _check_psi_domain(z)
    return sqrt_branch(cayley(z))


def _psi_prime(z):
    return 1j / (_psi(z) * (z + 1j) ** 2)


def eval_symbol(kind: SymbolKind, z):
    z = np.asarray(z, dtype=complex)
    name, d = kind.name, kind.derivative
    if name == "cayley":
        return 2j / (z + 1j) ** 2 if d else cayley(z)
    if name == "sqrt":
        r = sqrt_branch(z)
        return 0.5 / r if d else r
    if name == "psi":
        return _psi_prime(z) if d else _psi(z)
    if name == "psi_lambda":
        diff = _psi(z) - kind.lam
        return -_psi_prime(z) / diff**2 if d else 1.0 / diff
    if name == "theta":
        val = np.exp(1j * kind.alpha * z)
        return 1j * kind.alpha * val if d else val
    if np.any(z == 1):
        raise ValueError("vartheta is singular at z = 1")
    val = np.exp(kind.alpha * (z + 1) / (z - 1))
    return val * (-2.0 * kind.alpha) / (z - 1) ** 2 if d else val


def abs_psi_prime_strip(t, y):
    """|Psi'(t+iy)| for |y| < 1 from the closed-form modulus."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(np.abs(y) >= 1):
        raise ValueError("strip formula needs |y| < 1")
    sq = 1.0 / (np.sqrt(t**2 + (1 - y) ** 2) * (t**2 + (1 + y) ** 2) ** 1.5)
    return np.sqrt(sq)


def psi_prime_real(xi):
    """Psi' on the real line, rewritten without branches."""
    xi = np.asarray(xi, dtype=float)
    return -(1.0 + 1j * xi) / (1.0 + xi**2) ** 1.5


def fourier_psi_prime(s):
    """(F Psi')(s) = -sqrt(2/pi) (|s| K_1(|s|) + s K_0(|s|)).

    Obtained from the cosine and sine transforms of (1+x^2)^{-3/2} and
    x (1+x^2)^{-3/2}; real valued, decaying like sqrt|s| e^{-|s|}.
    """
    s = np.asarray(s, dtype=float)
    a = np.abs(s)
    safe = np.where(a > 0, a, 1.0)
    core = np.where(a > 0, safe * special.k1(safe) + s * special.k0(safe), 1.0)
    return -math.sqrt(2.0 / math.pi) * core


def dini_integral(psi: GridFunction, delta: float) -> float:
    """Trapezoid value of int_{-delta}^{delta} |(psi(t) - psi(0))/t| dt."""
    try:
        i0 = -psi.offset
    except ValueError:
        raise ValueError("grid does not contain 0") from None
    if not 0 < i0 < psi.M - 1:
        raise ValueError("grid does not contain 0 in its interior")
    p = int(round(delta / psi.h))
    if abs(p * psi.h - delta) > 1e-9 * delta or p < 1:
        raise ValueError("delta must be a positive multiple of the grid step")
    if i0 - p < 0 or i0 + p >= psi.M:
        raise ValueError("grid does not cover [-delta, delta]")
    seg = psi.values[i0 - p: i0 + p + 1]
    t = psi.h * np.arange(-p, p + 1)
    integrand = np.empty(2 * p + 1)
    nz = t != 0
    integrand[nz] = np.abs((seg[nz] - seg[p]) / t[nz])
    integrand[p] = abs(seg[p + 1] - seg[p - 1]) / (2 * psi.h)
    return trapezoid(GridFunction(-delta, psi.h, integrand)).real


def paley_wiener_decay(fhat: GridFunction, c: float, ladder=None) -> CheckReport:
    """Weighted tails int_{|t|>T} e^{2c|t|} |fhat|^2 dt along a ladder of T.

    Tails of a nonnegative integrand always shrink with T, so integrability
    is judged from the band masses between consecutive rungs, which must
    decrease for a convergent integral and grow for a divergent one.
    """
    t = fhat.t
    if ladder is None:
        tmax = min(abs(t[0]), abs(t[-1]))
        ladder = np.linspace(0.0, 0.5 * tmax, 9)[1:]
    ladder = np.asarray(ladder, dtype=float)
    dens = np.exp(2 * c * np.abs(t)) * np.abs(fhat.values) ** 2 * fhat.h
    tails = np.array([dens[np.abs(t) > T].sum() for T in ladder])
    bands = tails[:-1] - tails[1:]
    # bands that underflow to zero count as decayed
    live = bands[1:] > 0
    decreasing = bool(np.all(np.diff(bands)[live] < 0)) and bool(np.all(np.diff(bands) <= 0))
    worst = int(np.argmax(np.diff(bands))) if bands.size > 1 else 0
    return CheckReport(
        f"paley_wiener(c={c:g})",
        passed=decreasing,
        lhs=float(bands[worst + 1]) if bands.size > 1 else 0.0,
        rhs=float(bands[worst]) if bands.size else 0.0,
        margin=float(bands[worst] - bands[worst + 1]) if bands.size > 1 else 0.0,
        witness=(float(ladder[worst + 1]),),
        details={"ladder": ladder.tolist(), "tails": tails.tolist(), "bands": bands.tolist(),
                 "integrable": decreasing},
    )


def log_integral(hs: GridFunction) -> float:
    """Windowed int log h(t) / (1 + t^2) dt."""
    vals = hs.values.real
    if np.any(vals <= 0):
        raise ValueError("log-integral is -inf: h vanishes on the window")
    return trapezoid(hs.with_values(np.log(vals) / (1 + hs.t**2))).real


def outer_function(hs: GridFunction, z):
    """Outer function with boundary modulus h, evaluated at z in C_+.

    exp((1/(pi i)) int [1/(t - z) - t/(1 + t^2)] log h(t) dt), truncated to
    the window of ``hs``. The modulus is the Poisson extension of h.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if np.any(z.imag <= 0):
        raise ValueError("outer function is evaluated in the open upper half-plane")
    vals = hs.values.real
    if np.any(vals <= 0) or not np.all(np.isfinite(np.log(vals))):
        raise ValueError("log-integral is -inf: h vanishes on the window")
    t = hs.t
    logh = np.log(vals)
    w = np.full(t.size, hs.h)
    w[[0, -1]] *= 0.5
    kern = 1.0 / (t[None, :] - z[:, None]) - (t / (1 + t**2))[None, :]
    out = np.exp((kern * (w * logh)[None, :]).sum(axis=1) / (math.pi * 1j))
    return out if out.size > 1 else complex(out[0])


def _rel_err(a, b) -> np.ndarray:
    a = np.asarray(a)
    b = np.asarray(b)
    return np.abs(a - b) / np.maximum(np.abs(b), 1e-300)


def check_square_identity(t: np.ndarray, tol: float = 1e-12) -> CheckReport:
    """Psi(t)^2 = cayley(t) and |Psi(t)| = 1 on real samples t != 0."""
    t = np.asarray(t, dtype=float)
    t = t[t != 0]
    psi = eval_symbol(SymbolKind("psi"), t)
    err = float(np.max(_rel_err(psi**2, cayley(t))))
    mod = float(np.max(np.abs(np.abs(psi) - 1)))
    worst = max(err, mod)
    return CheckReport("psi_square", worst <= tol, worst, tol, tol - worst,
                       details={"square_err": err, "modulus_err": mod, "samples": int(t.size)})


def check_strip_formula(t: np.ndarray, y: np.ndarray, tol: float = 1e-10) -> CheckReport:
    """|Psi'(t + i y)| against the closed-form modulus on a strip grid."""
    T, Y = np.meshgrid(np.asarray(t, float), np.asarray(y, float))
    keep = ~((T == 0) & (np.abs(Y) >= 1))
    T, Y = T[keep], Y[keep]
    direct = np.abs(eval_symbol(SymbolKind("psi", derivative=True), T + 1j * Y))
    err = _rel_err(direct, abs_psi_prime_strip(T, Y))
    i = int(np.argmax(err))
    return CheckReport("psi_prime_strip", float(err[i]) <= tol, float(err[i]), tol, tol - float(err[i]),
                       witness=(float(T[i]), float(Y[i])), details={"samples": int(T.size)})


def check_psi_at_zero() -> CheckReport:
    val = complex(eval_symbol(SymbolKind("psi"), 0.0))
    err = abs(val - 1j)
    return CheckReport("psi_at_zero", val == 1j, err, 0.0, -err, details={"value": val})


def check_composition(z: np.ndarray, alpha: float, tol: float = 1e-10) -> CheckReport:
    """vartheta_alpha(cayley(z)) = theta_alpha(z) for z in the upper half-plane."""
    lhs = eval_symbol(SymbolKind("vartheta", alpha=alpha), cayley(z))
    rhs = eval_symbol(SymbolKind("theta", alpha=alpha), z)
    err = float(np.max(_rel_err(lhs, rhs)))
    return CheckReport("vartheta_composition", err <= tol, err, tol, tol - err,
                       details={"alpha": alpha, "samples": int(np.size(z))})


def check_derivative_fd(z: np.ndarray, step: float = 1e-5, tol: float = 1e-6) -> CheckReport:
    """Central differences of Psi against the closed-form Psi'."""
    z = np.asarray(z, dtype=complex)
    fd = (eval_symbol(SymbolKind("psi"), z + step) - eval_symbol(SymbolKind("psi"), z - step)) / (2 * step)
    err = float(np.max(_rel_err(fd, eval_symbol(SymbolKind("psi", derivative=True), z))))
    return CheckReport("psi_prime_fd", err <= tol, err, tol, tol - err, details={"step": step})


def recipe_modulus(log_w: np.ndarray, t: np.ndarray, c: float = 1.0, eps: float = 1.0) -> np.ndarray:
    """log h for h = 1 on (-c, c) and h = |t|^{-1-eps} w^{-1/2} outside."""
    out = -(1 + eps) * np.log(np.maximum(np.abs(t), c)) - 0.5 * log_w
    return np.where(np.abs(t) < c, 0.0, out)


def outer_recipe_check(
    log_w: Callable[[np.ndarray], np.ndarray],
    L_max: float,
    c: float = 1.0,
    eps: float = 1.0,
    h: float = 0.125,
    ratio_threshold: float = 0.75,
) -> CheckReport:
    """Windowed integrals of h sqrt(w) and of log h/(1 + t^2) over [-L, L] for a
    doubling ladder of L.

    The log-integral is classified as convergent when its increments between
    rungs shrink by at least ``ratio_threshold`` per doubling at the top of
    the ladder; a divergent integral of log-log type shrinks them more slowly.
    """
    ladder = c * 2.0 ** np.arange(1, int(math.log2(L_max / c)) + 1)
    t = h * np.arange(-int(ladder[-1] / h), int(ladder[-1] / h) + 1)
    lw = log_w(t)
    logh = recipe_modulus(lw, t, c, eps)
    mass = np.exp(logh + 0.5 * lw)
    li = logh / (1 + t**2)
    l1, logs = [], []
    for L in ladder:
        m = np.abs(t) <= L
        l1.append(trapezoid(GridFunction(-L, h, mass[m])).real)
        logs.append(trapezoid(GridFunction(-L, h, li[m])).real)
    inc = -np.diff(logs)
    ratios = inc[1:] / inc[:-1]
    converging = bool(ratios.size and np.all(ratios[-3:] <= ratio_threshold))
    l1_inc = np.diff(l1)
    return CheckReport(
        "outer_recipe",
        passed=converging,
        lhs=float(ratios[-1]) if ratios.size else math.nan,
        rhs=ratio_threshold,
        margin=ratio_threshold - float(ratios[-1]) if ratios.size else math.nan,
        details={"c": c, "eps": eps, "ladder": ladder.tolist(), "log_integrals": logs,
                 "h_sqrt_w_l1": l1, "l1_last_increment": float(l1_inc[-1]) if l1_inc.size else 0.0},
        rows=tuple({"L": float(L), "log_integral": float(a), "h_sqrt_w_l1": float(b)}
                   for L, a, b in zip(ladder, logs, l1)),
    )
