"""Even/odd splitting of polynomials and matrix polynomial norms on the circle."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .report import CheckReport


@dataclass(frozen=True)
class Poly:
    coeffs: np.ndarray  # c_0, ..., c_N

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=complex))
        if c.ndim != 1 or c.size == 0 or not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be a nonempty finite vector")
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def __call__(self, z):
        return np.polynomial.polynomial.polyval(z, self.coeffs)


def even_odd_split(p: Poly) -> tuple[Poly, Poly]:
    """p(z) = p0(z^2) + z p1(z^2)."""
    c = p.coeffs
    odd = c[1::2]
    return Poly(c[0::2]), Poly(odd if odd.size else np.zeros(1))


def reconstruct(p0: Poly, p1: Poly) -> Poly:
    n = max(2 * p0.coeffs.size - 1, 2 * p1.coeffs.size)
    c = np.zeros(n, dtype=complex)
    c[0::2][: p0.coeffs.size] = p0.coeffs
    c[1::2][: p1.coeffs.size] = p1.coeffs
    return Poly(np.trim_zeros(c, "b") if np.any(c) else np.zeros(1))


@dataclass(frozen=True)
class MatrixPolyFamily:
    """n x n matrix of polynomials stored as a coefficient tensor (deg+1, n, n)."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim != 3 or c.shape[1] != c.shape[2]:
            raise ValueError("expected a (degree+1, n, n) coefficient array")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_polys(cls, polys: list[list[Poly]]) -> "MatrixPolyFamily":
        n = len(polys)
        if any(len(row) != n for row in polys):
            raise ValueError("family must be square")
        deg = max(p.degree for row in polys for p in row)
        c = np.zeros((deg + 1, n, n), dtype=complex)
        for i, row in enumerate(polys):
            for j, p in enumerate(row):
                c[: p.coeffs.size, i, j] = p.coeffs
        return cls(c)

    @classmethod
    def random(cls, n: int, degree: int, rng: np.random.Generator) -> "MatrixPolyFamily":
        shape = (degree + 1, n, n)
        return cls(rng.standard_normal(shape) + 1j * rng.standard_normal(shape))

    @property
    def n(self) -> int:
        return self.coeffs.shape[1]

    def at_points(self, z: np.ndarray) -> np.ndarray:
        """Values at each z as an array (len(z), n, n), by Horner's rule."""
        z = np.asarray(z, dtype=complex)
        out = np.zeros((z.size, self.n, self.n), dtype=complex)
        for c in self.coeffs[::-1]:
            out = out * z[:, None, None] + c
        return out

    def at_matrix(self, R: np.ndarray) -> np.ndarray:
        """The block matrix [p_ij(R)] of size (n d, n d)."""
        d = R.shape[0]
        n = self.n
        out = np.zeros((n * d, n * d), dtype=complex)
        power = np.eye(d, dtype=complex)
        for c in self.coeffs:
            out += np.kron(c, power)
            power = power @ R
        return out

    def split(self) -> tuple["MatrixPolyFamily", "MatrixPolyFamily"]:
        odd = self.coeffs[1::2]
        if odd.shape[0] == 0:
            odd = np.zeros((1, self.n, self.n))
        return MatrixPolyFamily(self.coeffs[0::2]), MatrixPolyFamily(odd)


def _norms_on_circle(F: MatrixPolyFamily, theta: np.ndarray) -> np.ndarray:
    return np.linalg.norm(F.at_points(np.exp(1j * theta)), ord=2, axis=(1, 2))


def hinf_matrix_norm(F: MatrixPolyFamily, gridsize: int = 2048, refine: int = 257, peaks: int = 4) -> float:
    """sup over |z| = 1 of the spectral norm of [p_ij(z)].

    A uniform grid is followed by one pass of local subdivision around the
    largest local maxima. The result is a lower bound of the true sup.
    """
    if gridsize < 64:
        raise ValueError("gridsize must be at least 64")
    theta = 2 * math.pi * np.arange(gridsize) / gridsize
    vals = _norms_on_circle(F, theta)
    best = float(vals.max())
    is_peak = (vals >= np.roll(vals, 1)) & (vals >= np.roll(vals, -1))
    idx = np.flatnonzero(is_peak)
    idx = idx[np.argsort(vals[idx])[::-1][:peaks]]
    step = 2 * math.pi / gridsize
    for i in idx:
        local = theta[i] + np.linspace(-step, step, refine)
        best = max(best, float(_norms_on_circle(F, local).max()))
    return best


def check_split_matrix_inequalities(F: MatrixPolyFamily, gridsize: int = 2048, tol: float = 1e-6) -> CheckReport:
    """||F_0|| <= ||F|| and ||F_1|| <= ||F|| in H-infinity."""
    F0, F1 = F.split()
    nF = hinf_matrix_norm(F, gridsize)
    n0 = hinf_matrix_norm(F0, gridsize)
    n1 = hinf_matrix_norm(F1, gridsize)
    worst = max(n0, n1)
    return CheckReport(
        "split_matrix_inequalities",
        passed=worst <= nF * (1 + tol),
        lhs=worst,
        rhs=nF,
        margin=nF - worst,
        details={"norm_F": nF, "norm_F0": n0, "norm_F1": n1},
    )


def random_nilpotent(d: int, rng: np.random.Generator) -> np.ndarray:
    """Strictly upper triangular R rescaled so that ||R^2|| <= 1."""
    R = np.triu(rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)), 1)
    s = np.linalg.norm(R @ R, 2)
    return R / math.sqrt(s) if s > 1 else R


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def cpb_square_root_check(R: np.ndarray, F: MatrixPolyFamily, gridsize: int = 2048) -> CheckReport:
    """Block identity [p(R)] = [p0(T)] + (I (x) R)[p1(T)] with T = R^2 and the bound
    ||[p(R)]|| <= (1 + ||R||) M ||F||, M the measured complete bound of T on F0, F1.
    """
    R = np.asarray(R, dtype=complex)
    T = R @ R
    normT = float(np.linalg.norm(T, 2))
    if normT > 1 + 1e-12:
        raise ValueError(f"T = R^2 is not a contraction (norm {normT:.6g})")
    F0, F1 = F.split()
    pR = F.at_matrix(R)
    p0T = F0.at_matrix(T)
    p1T = F1.at_matrix(T)
    lifted = np.kron(np.eye(F.n), R)
    normR = float(np.linalg.norm(R, 2))
    n_p0T = float(np.linalg.norm(p0T, 2))
    n_p1T = float(np.linalg.norm(p1T, 2))
    ident = float(np.linalg.norm(pR - p0T - lifted @ p1T, 2)) / max(n_p0T + normR * n_p1T, 1e-300)
    nF = hinf_matrix_norm(F, gridsize)
    n0 = hinf_matrix_norm(F0, gridsize)
    n1 = hinf_matrix_norm(F1, gridsize)
    measured_M = max(n_p0T / n0 if n0 > 0 else 0.0, n_p1T / n1 if n1 > 0 else 0.0)
    lhs = float(np.linalg.norm(pR, 2))
    chain = [lhs, n_p0T + normR * n_p1T, (1 + normR) * measured_M * nF]
    chain_ok = chain[0] <= chain[1] * (1 + 1e-12) and chain[1] <= chain[2] * (1 + 1e-6)
    return CheckReport(
        "cpb_square_root",
        passed=ident <= 1e-12 and chain_ok,
        lhs=lhs,
        rhs=chain[2],
        margin=chain[2] - lhs,
        details={"identity_residual": ident, "norm_R": normR, "norm_T": normT,
                 "measured_M": measured_M, "chain": chain, "norm_F": nF},
    )
