"""Check suites run by the command line front end.

Each suite maps a :class:`RunConfig` to a list of reports with unique names.
"""

from __future__ import annotations

import math
from dataclasses import replace
from typing import Callable

import numpy as np

from . import beurling as B
from . import convops as C
from . import grid as G
from . import halfplane as H
from . import measures as Me
from . import polysplit as P
from . import shiftop as S
from . import weights as W
from .config import RunConfig
from .report import CheckReport

EPSILONS = (1.0, 0.5, 0.1)


def _named(report: CheckReport, name: str) -> CheckReport:
    return replace(report, name=name)


def _skipped(name: str, reason: str) -> CheckReport:
    return CheckReport(name, True, math.nan, math.nan, math.nan, details={"applicable": False, "reason": reason})


def bump(t: np.ndarray, center: float = 0.0, radius: float = 1.0) -> np.ndarray:
    x = (np.asarray(t, dtype=float) - center) / radius
    out = np.zeros_like(x)
    inside = np.abs(x) < 1
    out[inside] = np.exp(-1.0 / (1.0 - x[inside] ** 2))
    return out


def weights_suite(cfg: RunConfig) -> list[CheckReport]:
    fam = cfg.family.build(cfg.alpha)
    omega = W.build_weight(fam, cfg.N)
    const = W.submult_constant(fam)
    out = [W.check_submultiplicativity(omega, const)]
    step = W.StepWeight.from_weight(omega)
    out.append(W.check_step_submultiplicativity(step, const, float(omega.omega(np.array([-2]))[0])))
    for eps in EPSILONS:
        name = f"subexponential(eps={eps:g})"
        try:
            sc = W.subexp_constant(fam, eps)
        except ValueError as exc:
            out.append(_skipped(name, str(exc)))
            continue
        out.append(W.check_subexponential(omega, sc))
    out.append(W.check_phi_sandwich(fam, min(cfg.N, 100)))
    sums = W.quasi_partial_sums(omega)
    out.append(CheckReport(
        "quasi_partial_sums", True, float(sums[-1]), math.nan, math.nan,
        details={"N": cfg.N},
        rows=tuple({"n": i, "partial_sum": float(s)} for i, s in enumerate(sums)),
    ))
    return out


def quasi_suite(cfg: RunConfig) -> list[CheckReport]:
    fam = cfg.family.build(cfg.alpha)
    N = min(cfg.N, fam.K - 1)
    out = []
    if N >= 1:
        out.append(W.threshold_chain_check(fam, lambda n: n, N))
    else:
        out.append(_skipped("threshold_chain", "family has a single term"))
    omega = W.build_weight(fam, cfg.N + 2)
    lw = 0.5 * omega.log_omega2_neg  # log omega(-n-1), nondecreasing in n
    grid = np.arange(lw.size, dtype=float)

    def M(u):
        return np.interp(np.asarray(u) / cfg.alpha - 1.0, grid, lw)

    out.append(W.series_integral_check(M, cfg.alpha, cfg.N))
    return out


def _richardson(name: str, coarse: CheckReport, fine: CheckReport, lo=3.0, hi=5.0) -> CheckReport:
    ratio = coarse.lhs / fine.lhs if fine.lhs > 0 else math.inf
    return CheckReport(name, lo <= ratio <= hi, ratio, hi, min(ratio - lo, hi - ratio),
                       details={"coarse": coarse.lhs, "fine": fine.lhs, "interval": [lo, hi]})


def psi_symbol(xi: np.ndarray) -> np.ndarray:
    return H.sqrt_branch(H.cayley(np.asarray(xi, dtype=complex)))


def pv_identity_reports(alpha: float, per_cell: int, M: int, tol: float) -> dict[str, CheckReport]:
    """Multiplier identity, assembled identity and support dilation on one grid."""
    t0, h, M = G.default_grid(alpha, M, per_cell)
    f = G.sample(lambda t: bump(t, 0.0, 3.0 * alpha), h, M, t0)
    psi = C.kernel_from_function(H.fourier_psi_prime, h, M, decay="exponential")
    split = C.make_singular_split(psi, alpha / 2, H.fourier_psi_prime)
    return {
        "multiplier": C.check_multiplier_identity(split, f, tol),
        "assembly": C.check_assembly_identity(psi_symbol, split, 1j, f, tol),
        "support": C.check_support_dilation(split, f),
    }


def conv_suite(cfg: RunConfig) -> list[CheckReport]:
    alpha = cfg.alpha
    fam = cfg.family.build(alpha)
    rng = np.random.default_rng(cfg.seed)
    out = []
    # dense window for the operator norms: [-32 alpha, 32 alpha) at alpha/16
    hw = alpha / 16
    window = (-32 * alpha, hw, 1024)
    omega = W.build_weight(fam, max(cfg.N, 128))
    w_fam = W.StepWeight.from_weight(omega)
    om2 = float(omega.omega(np.array([-2]))[0])
    weights = {"unit": (W.StepWeight.unit(alpha, w_fam.N), 1.0),
               "family": (w_fam, W.submult_constant(fam) ** 2 * om2**2)}
    kernels = {
        "gaussian": C.kernel_from_function(lambda t: np.exp(-(t**2)), hw, 257, decay="gaussian"),
        "bump": C.kernel_from_function(lambda t: bump(t, 0.0, alpha), hw, 257, alpha, "compact"),
        "fourier_psi_prime": C.kernel_from_function(H.fourier_psi_prime, hw, 1025, decay="exponential"),
    }
    for kn, k in kernels.items():
        for wn, (w, const) in weights.items():
            r = C.check_young_bound(k, w, const, window, cfg.tolerances["young_rtol"])
            out.append(_named(r, f"young_bound({kn},{wn})"))
    for frac in (0.25, 0.5, 0.75):
        d = frac * alpha
        k = C.kernel_from_function(lambda t: bump(t, 0.0, d), hw, 257, d, "compact")
        out.append(_named(C.banded_weighted_bound(k, omega, window), f"banded_bound(delta={frac:g}alpha)"))
    ident = C.banded_weighted_bound(C.delta_kernel(hw), omega, window)
    ratio = ident.details["ratio"]
    out.append(CheckReport("banded_identity_ratio", ratio >= 3, ratio, 3.0, ratio - 3.0,
                           details={"estimate": ident.details["estimate"], "bound": ident.rhs}))

    tol = cfg.tolerances["identity"]
    coarse = pv_identity_reports(alpha, cfg.grid.per_cell, cfg.grid.M, tol)
    fine = pv_identity_reports(alpha, 2 * cfg.grid.per_cell, 2 * cfg.grid.M, tol)
    out += [coarse["multiplier"], coarse["assembly"], coarse["support"]]
    out.append(_richardson("richardson(multiplier_identity)", coarse["multiplier"], fine["multiplier"]))
    out.append(_richardson("richardson(assembly_identity)", coarse["assembly"], fine["assembly"]))

    h = alpha / cfg.grid.per_cell
    f = G.sample(lambda t: np.exp(-(t**2)), h, 4096)
    fh = G.inverse_transform(f)
    theta = fh.with_values(np.exp(1j * alpha * fh.t))
    shifted = C.convolve(C.symbol_kernel(theta), f).values / G.SQRT_2PI
    err = float(np.max(np.abs(shifted - G.translate(f, alpha).values)))
    out.append(CheckReport("theta_translation", err <= 1e-8, err, 1e-8, 1e-8 - err))
    out.append(_named(C.mult_conv_duality_check(theta, f), "mult_conv_duality(theta)"))
    smooth = fh.with_values(np.exp(-(fh.t**2) / 3) * (1 + 0.5 * np.cos(fh.t)))
    out.append(_named(C.mult_conv_duality_check(smooth, f), "mult_conv_duality(smooth)"))

    g = G.GridFunction(-8.0, h, np.zeros(int(16 / h)))
    g = g.with_values(bump(g.t, 0.0, 4.0) * (rng.standard_normal(g.M) + 1j * rng.standard_normal(g.M)))
    k = C.kernel_from_function(lambda t: np.exp(-(t**2)), h, 257)
    diff = C.convolve(k, g, "fft").values - C.convolve(k, g, "direct").values
    d = float(np.max(np.abs(diff)))
    out.append(CheckReport("fft_vs_direct", d <= 1e-10, d, 1e-10, 1e-10 - d))
    return out


def shift_suite(cfg: RunConfig) -> list[CheckReport]:
    fam = cfg.family.build(cfg.alpha)
    omega = W.build_weight(fam, cfg.N)
    sn = S.shift_norm(omega)
    out = [CheckReport("shift_norm", sn <= 1.0, sn, 1.0, 1.0 - sn),
           S.check_inverse_bound(omega, W.submult_constant(fam))]
    for eps in EPSILONS:
        try:
            sc = W.subexp_constant(fam, eps)
        except ValueError as exc:
            out.append(_skipped(f"spectral_probe(eps={eps:g})", str(exc)))
            continue
        out.append(S.check_spectral_probe(omega, sc))
    out.append(S.translation_model_check(omega, block_function(cfg, 6), cfg.tolerances["translation"]))
    return out


def block_function(cfg: RunConfig, cells: int) -> G.GridFunction:
    """Random combination of sin^2 bumps, one per cell in [-cells, cells)."""
    rng = np.random.default_rng(cfg.seed)
    p = cfg.grid.per_cell
    h = cfg.alpha / p
    n = np.arange(-(cells + 2) * p, (cells + 2) * p)
    t = n * h
    cell = np.floor_divide(n, p)
    local = np.sin(np.pi * (n - cell * p) / p) ** 2
    coeff = rng.standard_normal(2 * cells + 4) + 1j * rng.standard_normal(2 * cells + 4)
    vals = np.where(np.abs(cell + 0.5) < cells, local * coeff[cell + cells + 2], 0.0)
    return G.GridFunction(float(t[0]), h, vals)


def cell_bump(alpha: float, per_cell: int, power: int = 8) -> G.GridFunction:
    h = alpha / per_cell
    t = h * np.arange(per_cell + 1)
    vals = np.sin(np.pi * t / alpha) ** power * (1 + 0.3 * np.cos(5 * t / alpha) + 0.2j * t / alpha)
    return G.GridFunction(0.0, h, vals)


def measure_suite(cfg: RunConfig) -> list[CheckReport]:
    fam = cfg.family.build(cfg.alpha)
    out = []
    worst, rows = 0.0, []
    for k in range(9):
        for r in (0.1, 0.3, 0.5):
            rep = Me.halfplane_identity_check(lambda z, k=k: z**k, r, cfg.tolerances["halfplane"])
            worst = max(worst, rep.lhs)
            rows.append({"k": k, "r": r, "rel_err": rep.lhs})
    tol = cfg.tolerances["halfplane"]
    out.append(CheckReport("halfplane_identity", worst <= tol, worst, tol, tol - worst, rows=tuple(rows)))
    mu = Me.LineMeasure.from_family(fam)
    back = Me.to_halfplane(Me.to_disc(mu))
    rt = float(np.max(np.abs(back.v - mu.v) / mu.v))
    out.append(CheckReport("measure_round_trip", rt <= 1e-15, rt, 1e-15, 1e-15 - rt))
    out.append(Me.check_gram_blocks(cell_bump(cfg.alpha, cfg.grid.per_cell), fam, 8,
                                    cfg.tolerances["gram_offdiag"], cfg.tolerances["gram_diag"]))
    return out


def _converging(values: np.ndarray, threshold: float = 0.75) -> bool:
    inc = np.abs(np.diff(values))
    ratios = inc[1:] / inc[:-1]
    return bool(ratios.size and np.all(ratios[-3:] <= threshold))


def symbol_suite(cfg: RunConfig) -> list[CheckReport]:
    rng = np.random.default_rng(cfg.seed)
    alpha = cfg.alpha
    out = [
        H.check_square_identity(np.linspace(-50, 50, 2001)),
        H.check_strip_formula(np.linspace(-5, 5, 101), np.linspace(-0.9, 0.9, 37)),
        H.check_psi_at_zero(),
        H.check_composition(rng.uniform(-3, 3, 1000) + 1j * rng.uniform(0.01, 3, 1000), alpha),
        H.check_derivative_fd(rng.uniform(-3, 3, 200) + 1j * rng.uniform(-0.9, 0.9, 200)),
    ]
    t0, h, M = G.default_grid(alpha, cfg.grid.M, cfg.grid.per_cell)
    fpp = G.sample(H.fourier_psi_prime, h, M, t0)
    out.append(H.paley_wiener_decay(fpp, 0.5))
    dini = H.dini_integral(fpp, alpha / 2)
    out.append(CheckReport("dini_finite", math.isfinite(dini), dini, math.inf, math.inf,
                           details={"delta": alpha / 2}))
    l1 = float(np.sum(np.abs(fpp.values)) * h)
    out.append(CheckReport("fourier_psi_prime_l1", math.isfinite(l1), l1, math.inf, math.inf,
                           details={"window": [t0, h, M]}))

    fam = cfg.family.build(alpha)
    L_max = 4096.0 * alpha
    omega = W.build_weight(fam, int(L_max / alpha) + 2)
    step = W.StepWeight.from_weight(omega)
    recipe = H.outer_recipe_check(lambda t: step.log_cell(np.floor(t / alpha).astype(int)), L_max)
    sums = W.quasi_partial_sums(omega)
    ladder = (2 ** np.arange(1, int(math.log2(omega.N)) + 1)) - 1
    series_conv = _converging(sums[ladder])
    agree = recipe.passed == series_conv
    out.append(CheckReport(
        "outer_recipe_consistency", agree, float(recipe.lhs), recipe.rhs, recipe.margin,
        details={"log_integral_converging": recipe.passed, "series_converging": series_conv,
                 "log_integrals": recipe.details["log_integrals"]},
        rows=recipe.rows,
    ))
    return out


def poly_suite(cfg: RunConfig) -> list[CheckReport]:
    rng = np.random.default_rng(cfg.seed)
    bad = 0
    for _ in range(100):
        p = P.Poly(rng.standard_normal(21) + 1j * rng.standard_normal(21))
        p0, p1 = P.even_odd_split(p)
        q = P.reconstruct(p0, p1)
        bad += not np.array_equal(q.coeffs, p.coeffs)
    out = [CheckReport("even_odd_reconstruction", bad == 0, bad, 0, -bad)]
    worst = -math.inf
    for s in range(100):
        r = np.random.default_rng(cfg.seed + s)
        F = P.MatrixPolyFamily.random(3, int(r.integers(1, 11)), r)
        rep = P.check_split_matrix_inequalities(F, tol=cfg.tolerances["split_grid"])
        worst = max(worst, rep.lhs / rep.rhs - 1)
    tol = cfg.tolerances["split_grid"]
    out.append(CheckReport("split_matrix_inequalities", worst <= tol, worst, tol, tol - worst,
                           details={"families": 100, "scale": "relative excess"}))
    ident, fails, Ms = 0.0, 0, []
    for i in range(100):
        d = int(rng.integers(2, 7))
        F = P.MatrixPolyFamily.random(2, int(rng.integers(1, 8)), rng)
        R = P.random_unitary(d, rng) if i % 2 == 0 else P.random_nilpotent(d, rng)
        rep = P.cpb_square_root_check(R, F)
        ident = max(ident, rep.details["identity_residual"])
        Ms.append(rep.details["measured_M"])
        fails += not rep.passed
    out.append(CheckReport("cpb_square_root", fails == 0 and ident <= 1e-12, ident, 1e-12, 1e-12 - ident,
                           details={"pairs": 100, "failures": fails, "max_measured_M": max(Ms)}))
    return out


def beurling_suite(cfg: RunConfig) -> list[CheckReport]:
    alpha = cfg.alpha
    rng = np.random.default_rng(cfg.seed)
    rect = B.RectangleSpec(-1.0, 2.0, 0.5 / alpha)
    val = B.varsigma_estimate(lambda z: np.exp(1j * alpha * z), rect)
    err = abs(val - math.sqrt(rect.width)) / math.sqrt(rect.width)
    out = [CheckReport("varsigma_theta", err <= 1e-8, err, 1e-8, 1e-8 - err)]
    h = alpha / cfg.grid.per_cell
    worst, fails = 0.0, 0
    for n in range(33):
        vals = rng.standard_normal(cfg.grid.per_cell + 1) + 1j * rng.standard_normal(cfg.grid.per_cell + 1)
        g = G.GridFunction(0.0, h, vals)
        for c in (0.25, 0.5, 0.9):
            rep = B.tail_bound_check(g, n, alpha, B.RectangleSpec(-2.0, 3.0, c / alpha))
            worst = max(worst, rep.details["ratio"])
            fails += not rep.passed
    out.append(CheckReport("tail_bound_sweep", fails == 0, worst, 1.0, 1.0 - worst,
                           details={"n_max": 32, "c": [0.25, 0.5, 0.9], "failures": fails}))
    fam = cfg.family.build(alpha)
    out.append(B.m_lower_bound_table(fam, 2.0, min(cfg.N, 100)))
    return out


SUITE_FUNCS: dict[str, Callable[[RunConfig], list[CheckReport]]] = {
    "weights": weights_suite,
    "quasi": quasi_suite,
    "conv": conv_suite,
    "shift": shift_suite,
    "measure": measure_suite,
    "symbol": symbol_suite,
    "poly": poly_suite,
    "beurling": beurling_suite,
}
