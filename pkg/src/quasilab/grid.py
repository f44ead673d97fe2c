"""Uniform grids, trapezoid quadrature and the symmetric Fourier convention

    (F f)(xi) = (2 pi)^{-1/2} int e^{-i xi s} f(s) ds,
    (F^{-1} g)(s) = (2 pi)^{-1/2} int e^{+i xi s} g(xi) dxi.

A grid of M points with step h is paired with the frequency grid of step
2 pi/(M h). Both discrete maps are exactly unitary and mutually inverse, so
the only error against the continuum is sampling and truncation.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .weights import StepWeight

SQRT_2PI = math.sqrt(2.0 * math.pi)


class EdgeMassWarning(RuntimeWarning):
    """The sampled function has not decayed near the window edges."""


@dataclass(frozen=True)
class GridFunction:
    t0: float
    h: float
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.ndim != 1 or vals.size < 2:
            raise ValueError("a grid function needs at least two samples")
        if not self.h > 0:
            raise ValueError("grid step must be positive")
        object.__setattr__(self, "values", vals)

    @property
    def M(self) -> int:
        return int(self.values.size)

    @property
    def t(self) -> np.ndarray:
        return self.t0 + self.h * np.arange(self.M)

    @property
    def offset(self) -> int:
        """Integer index of t0 in units of h (grids are kept commensurate)."""
        return _as_int(self.t0 / self.h, "t0/h")

    def with_values(self, values) -> "GridFunction":
        return GridFunction(self.t0, self.h, values)

    def same_grid(self, other: "GridFunction") -> bool:
        return (
            self.M == other.M
            and math.isclose(self.h, other.h, rel_tol=1e-12)
            and abs(self.t0 - other.t0) <= 1e-9 * self.h
        )

    def norm(self) -> float:
        return math.sqrt(self.h * float(np.sum(np.abs(self.values) ** 2)))


@dataclass(frozen=True)
class FrequencyGrid:
    origin: float
    step: float
    M: int


def _as_int(x: float, what: str) -> int:
    r = round(x)
    if abs(x - r) > 1e-8 * max(1.0, abs(x)):
        raise ValueError(f"{what} = {x} is not an integer")
    return int(r)


def centered_origin(M: int, h: float) -> float:
    return -(M // 2) * h


def sample(fn: Callable[[np.ndarray], np.ndarray], h: float, M: int, t0: float | None = None) -> GridFunction:
    t0 = centered_origin(M, h) if t0 is None else t0
    return GridFunction(t0, h, fn(t0 + h * np.arange(M)))


def default_grid(alpha: float, M: int = 2**14, per_cell: int = 64) -> tuple[float, float, int]:
    """(t0, h, M) of the default window: h = alpha/64, centered on 0."""
    h = alpha / per_cell
    return centered_origin(M, h), h, M


def dual_grid(f: GridFunction, origin: float | None = None) -> FrequencyGrid:
    step = 2.0 * math.pi / (f.M * f.h)
    return FrequencyGrid(centered_origin(f.M, step) if origin is None else origin, step, f.M)


def _dft(f: GridFunction, out: FrequencyGrid, sign: int) -> np.ndarray:
    """h/sqrt(2 pi) sum_j exp(sign i s_k t_j) f_j on the output grid s_k."""
    M = f.M
    j = np.arange(M)
    x = f.values * np.exp(sign * 1j * out.origin * f.h * j)
    y = np.fft.fft(x) if sign < 0 else np.fft.ifft(x) * M
    phase = np.exp(sign * 1j * (out.origin * f.t0 + out.step * f.t0 * j))
    return (f.h / SQRT_2PI) * phase * y


def _edge_check(f: GridFunction, tol: float = 1e-10) -> None:
    w = max(1, f.M // 100)
    total = float(np.sum(np.abs(f.values) ** 2))
    edge = float(np.sum(np.abs(f.values[:w]) ** 2) + np.sum(np.abs(f.values[-w:]) ** 2))
    if total > 0 and edge > tol * total:
        warnings.warn(f"edge mass fraction {edge / total:.2e} exceeds {tol:g}", EdgeMassWarning, stacklevel=3)


def transform(f: GridFunction, origin: float | None = None) -> GridFunction:
    """Discrete version of F on the dual grid (centered unless ``origin``)."""
    _edge_check(f)
    out = dual_grid(f, origin)
    return GridFunction(out.origin, out.step, _dft(f, out, -1))


def inverse_transform(F: GridFunction, origin: float | None = None) -> GridFunction:
    """Discrete version of F^{-1}; exact inverse of :func:`transform`."""
    out = dual_grid(F, origin)
    return GridFunction(out.origin, out.step, _dft(F, out, +1))


def translate(f: GridFunction, shift: float) -> GridFunction:
    """f(t - shift), exact sample shift with zero fill."""
    m = _as_int(shift / f.h, "shift/h")
    return f.with_values(shift_samples(f.values, m))


def shift_samples(values: np.ndarray, m: int) -> np.ndarray:
    """values[i - m] with zero fill (same as translate by m*h)."""
    out = np.zeros_like(values)
    M = values.size
    if abs(m) >= M:
        return out
    if m >= 0:
        out[m:] = values[: M - m]
    else:
        out[:m] = values[-m:]
    return out


def trapezoid(f: GridFunction) -> complex:
    v = f.values
    return complex(f.h * (np.sum(v) - 0.5 * (v[0] + v[-1])))


def cell_index(f: GridFunction, alpha: float) -> np.ndarray:
    """Cell n of each grid point, cells being [n alpha, (n+1) alpha)."""
    p = _as_int(alpha / f.h, "alpha/h")
    return np.floor_divide(f.offset + np.arange(f.M), p)


def weighted_inner(f: GridFunction, g: GridFunction, w: StepWeight) -> complex:
    """Trapezoid value of int f conj(g) w dt."""
    if not f.same_grid(g):
        raise ValueError("f and g live on different grids")
    lw = w.log_cell(cell_index(f, w.alpha))
    integrand = f.values * np.conj(g.values) * np.exp(lw)
    return trapezoid(f.with_values(integrand))


def write_csv(f: GridFunction, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "re", "im"])
        for t, v in zip(f.t, f.values):
            writer.writerow([repr(float(t)), repr(float(v.real)), repr(float(v.imag))])


def read_csv(path: str | Path) -> GridFunction:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    t = np.array([float(r["t"]) for r in rows])
    v = np.array([complex(float(r["re"]), float(r["im"])) for r in rows])
    h = float(np.mean(np.diff(t)))
    if np.max(np.abs(np.diff(t) - h)) > 1e-9 * max(1.0, abs(h)):
        raise ValueError("samples are not on a uniform grid")
    return GridFunction(float(t[0]), h, v)
