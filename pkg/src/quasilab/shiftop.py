"""Truncations of the bilateral weighted shift (S u)(n) = u(n - 1) on
l^2(omega), and the cell-block picture of translation by alpha."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import grid as G
from .grid import GridFunction
from .report import CheckReport
from .weights import StepWeight, SubexpConstant, WeightSequence


@dataclass(frozen=True)
class ShiftTruncation:
    """S restricted to indices [-N, N], zero fill entering at n = -N."""

    omega: WeightSequence
    N: int

    def __post_init__(self):
        if not 1 <= self.N <= self.omega.N:
            raise ValueError(f"N must lie in [1, {self.omega.N}]")

    @property
    def indices(self) -> np.ndarray:
        return np.arange(-self.N, self.N + 1)

    def apply(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u)
        if u.shape != (2 * self.N + 1,):
            raise ValueError("vector length must be 2N + 1")
        out = np.zeros_like(u)
        out[1:] = u[:-1]
        return out

    def norm_of(self, u: np.ndarray) -> float:
        lw = self.omega.log_omega2(self.indices)
        return math.sqrt(math.fsum(np.abs(u) ** 2 * np.exp(lw)))

    def log_ratios(self) -> np.ndarray:
        """log omega(n+1)/omega(n) for -N <= n < N."""
        n = np.arange(-self.N, self.N)
        return self.omega.log_omega(n + 1) - self.omega.log_omega(n)


def shift_norm(omega: WeightSequence, N: int | None = None) -> float:
    """sup omega(n+1)/omega(n) on the truncation (the exact norm there)."""
    S = ShiftTruncation(omega, omega.N if N is None else N)
    return math.exp(float(np.max(S.log_ratios())))


def shift_inverse_norm(omega: WeightSequence, N: int | None = None) -> float:
    S = ShiftTruncation(omega, omega.N if N is None else N)
    return math.exp(float(-np.min(S.log_ratios())))


def check_inverse_bound(omega: WeightSequence, C: float, N: int | None = None) -> CheckReport:
    """shift_inverse_norm <= sqrt(C) omega(-2)."""
    value = shift_inverse_norm(omega, N)
    bound = math.sqrt(C) * float(omega.omega(np.array([-2]))[0])
    return CheckReport(
        "shift_inverse_bound",
        passed=value <= bound + 1e-9,
        lhs=value,
        rhs=bound,
        margin=bound - value,
        details={"shift_norm": shift_norm(omega, N), "C": C},
    )


def spectral_radius_probe(omega: WeightSequence, N: int | None = None) -> np.ndarray:
    """r_n = (omega(-n)/omega(0))^{1/n}, n = 1..N."""
    N = omega.N if N is None else N
    n = np.arange(1, N + 1)
    return np.exp((omega.log_omega(-n) - omega.log_omega(np.zeros(1, dtype=int))) / n)


def check_spectral_probe(omega: WeightSequence, sc: SubexpConstant, N: int | None = None) -> CheckReport:
    """r_n <= e^{eps/2} C_eps^{1/(2n)} for every probed n, in logs."""
    r = spectral_radius_probe(omega, N)
    n = np.arange(1, r.size + 1)
    log_rhs = 0.5 * sc.eps + 0.5 * sc.log_C / n
    slack = log_rhs - np.log(r)
    worst = int(np.argmin(slack))
    peak = int(np.argmax(r))
    return CheckReport(
        f"spectral_probe(eps={sc.eps:g})",
        passed=bool(np.all(slack >= -1e-12)),
        lhs=float(np.log(r[worst])),
        rhs=float(log_rhs[worst]),
        margin=float(slack[worst]),
        witness=(int(n[worst]),),
        details={"scale": "log", "r_last": float(r[-1]), "peak_n": peak + 1,
                 "decreasing_after_peak": bool(np.all(np.diff(r[peak:]) <= 1e-15))},
        rows=tuple({"n": int(k), "r_n": float(v)} for k, v in zip(n, r)),
    )


def block_norms(f: GridFunction, alpha: float) -> tuple[np.ndarray, np.ndarray]:
    """Cell indices and the trapezoid L^2 norms squared of f on each cell."""
    cells = G.cell_index(f, alpha)
    ids = np.unique(cells)
    dens = np.abs(f.values) ** 2
    vals = np.array([G.trapezoid(GridFunction(0.0, f.h, _pad(dens[cells == c]))).real for c in ids])
    return ids, vals


def _pad(x: np.ndarray) -> np.ndarray:
    # trapezoid needs two points; a lone sample sits inside a cell with zero neighbours
    return np.concatenate([[0.0], x, [0.0]])


def translation_model_check(omega: WeightSequence, f: GridFunction, tol: float = 1e-10) -> CheckReport:
    """||f(. - alpha)||^2 in L^2(w) against sum_n ||block_n f||^2 omega^2(n+1).

    ``f`` must vanish at every cell endpoint, so each block is a function
    supported in the interior of its cell.
    """
    alpha = omega.alpha
    p = G._as_int(alpha / f.h, "alpha/h")
    starts = (f.offset + np.arange(f.M)) % p == 0
    if np.any(f.values[starts] != 0):
        raise ValueError("f must vanish at the cell endpoints")
    if np.any(f.values[-p:] != 0):
        raise ValueError("the translate leaves the window; pad f on the right by one cell")
    w = StepWeight.from_weight(omega)
    route1 = G.weighted_inner(G.translate(f, alpha), G.translate(f, alpha), w).real
    ids, norms = block_norms(f, alpha)
    route2 = math.fsum(norms * np.exp(omega.log_omega2(ids + 1)))
    disc = abs(route1 - route2) / max(abs(route2), 1e-300)
    return CheckReport(
        "translation_model",
        passed=disc <= tol,
        lhs=disc,
        rhs=tol,
        margin=tol - disc,
        details={"route_translate": route1, "route_shift": route2,
                 "blocks": [int(i) for i in ids[norms > 0]]},
    )
