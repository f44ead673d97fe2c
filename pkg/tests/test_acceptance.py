"""Acceptance criteria. Each test prints one PASS/FAIL line."""

import math

import numpy as np
import pytest

from quasilab import beurling as B
from quasilab import convops as C
from quasilab import grid as G
from quasilab import halfplane as H
from quasilab import measures as Me
from quasilab import polysplit as P
from quasilab import shiftop as S
from quasilab import suites
from quasilab import weights as W
from quasilab.config import RunConfig

from conftest import smooth_bump

ALPHA = 1.0


def _report(capsys, number: int, title: str, ok: bool, detail: str) -> None:
    with capsys.disabled():
        print(f"\n{'PASS' if ok else 'FAIL'}  criterion {number:2d}  {title}: {detail}")
    assert ok, detail


@pytest.fixture(scope="module")
def example():
    return W.shifted_geometric(0.5, 64, ALPHA)


def built_families():
    return {
        "shifted-geometric": W.shifted_geometric(0.5, 64, ALPHA),
        "geometric(0.3)": W.geometric(0.3, 64, ALPHA),
        "one-term": W.one_term(1.0, 0.7, ALPHA),
        "explicit": W.explicit([0.5, 0.25, 0.25], [2.0, 1.0, 0.5], ALPHA),
    }


def test_criterion_01_weight_correctness(capsys):
    worst = 0.0
    for a1, v1 in ((1.0, 1.0), (0.5, 0.3), (0.2, 0.05)):
        fam = W.one_term(a1, v1, ALPHA)
        omega = W.build_weight(fam, 501)
        n = np.arange(0, 501)
        exact = ALPHA * n * v1 - 0.5 * math.log(a1)
        got = omega.log_omega(-n - 1)
        worst = max(worst, float(np.max(np.abs(np.expm1(got - exact)))))
    unit = []
    for fam in (W.one_term(1.0, 1.0, ALPHA), W.explicit([0.5, 0.25, 0.25], [2.0, 1.0, 0.5], ALPHA),
                W.shifted_geometric(0.5, 64, ALPHA)):
        unit.append(float(W.build_weight(fam, 4).omega(np.array([-1]))[0]))
    ok = worst <= 1e-12 and all(u == 1.0 for u in unit)
    _report(capsys, 1, "weight closed form", ok, f"max rel err {worst:.2e}, omega(-1) = {unit}")


def test_criterion_02_submultiplicativity(capsys, example):
    omega = W.build_weight(example, 200)
    rep = W.check_submultiplicativity(omega, W.submult_constant(example), 200)
    ok = rep.lhs <= 1 + 1e-12
    _report(capsys, 2, "submultiplicativity", ok,
            f"max LHS/RHS {rep.lhs:.15f} at {rep.witness}, {rep.details['pairs']} pairs")


def test_criterion_03_subexponential(capsys, example):
    omega = W.build_weight(example, 501)
    parts, violations = [], 0
    for eps in (1.0, 0.5, 0.1):
        sc = W.subexp_constant(example, eps)
        rep = W.check_subexponential(omega, sc)
        violations += rep.details["violations"]
        parts.append(f"eps={eps:g}: k={sc.k_eps} ({rep.details['truncation']})")
    _report(capsys, 3, "subexponential growth", violations == 0, f"{violations} violations; " + ", ".join(parts))


def test_criterion_04_phi_sandwich(capsys, example):
    rep = W.check_phi_sandwich(example, 101, samples=64)
    ok = rep.margin >= -1e-12 and rep.details["tightness_at_alpha"] <= 1e-10
    _report(capsys, 4, "phi sandwich", ok,
            f"worst log slack {rep.margin:.3e}, middle bound at t=alpha rel {rep.details['tightness_at_alpha']:.2e}")


def test_criterion_05_threshold_chain(capsys):
    fam = W.shifted_geometric(0.5, 1100, ALPHA)
    N = 1000
    c = W.c_sequence(fam, np.arange(1, N + 1))
    c_err = float(np.max(np.abs(c - math.log(2)) / math.log(2)))
    rep = W.threshold_chain_check(fam, lambda n: n, N)
    n = np.arange(1, N + 1)
    v = 1.0 / np.log(n + 1.0)
    fails = np.nonzero(~(2 * ALPHA * v <= math.log(2)))[0]
    scan = int(n[fails[-1] + 1]) if fails.size else 1
    ok = c_err <= 1e-12 and rep.details["n0"] == scan and rep.passed
    _report(capsys, 5, "c_n, threshold and lower-bound chain", ok,
            f"c_n rel err {c_err:.1e}, n0 {rep.details['n0']} vs scan {scan}, chain margin {rep.margin:.3e}")


def test_criterion_06_young_bound(capsys, example):
    hw = ALPHA / 16
    window = (-32 * ALPHA, hw, 1024)
    omega = W.build_weight(example, 128)
    om2 = float(omega.omega(np.array([-2]))[0])
    weights = {"unit": (W.StepWeight.unit(ALPHA, 128), 1.0),
               "example": (W.StepWeight.from_weight(omega), W.submult_constant(example) ** 2 * om2**2)}
    kernels = {
        "gaussian": C.kernel_from_function(lambda t: np.exp(-t**2), hw, 257),
        "bump": C.kernel_from_function(lambda t: smooth_bump(t, 0.0, ALPHA), hw, 257, ALPHA, "compact"),
        "F(Psi')": C.kernel_from_function(H.fourier_psi_prime, hw, 1025),
    }
    excess = -math.inf
    for k in kernels.values():
        for w, const in weights.values():
            rep = C.check_young_bound(k, w, const, window)
            excess = max(excess, rep.lhs - rep.rhs)
    _report(capsys, 6, "Young bound", excess <= 1e-6, f"max (estimate - bound) {excess:.3e} over 6 pairs")


def test_criterion_07_banded_bound(capsys, example):
    hw = ALPHA / 16
    window = (-32 * ALPHA, hw, 1024)
    omega = W.build_weight(example, 128)
    ok = True
    parts = []
    for frac in (0.25, 0.5, 0.75):
        d = frac * ALPHA
        k = C.kernel_from_function(lambda t: smooth_bump(t, 0.0, d), hw, 257, d, "compact")
        rep = C.banded_weighted_bound(k, omega, window)
        ok &= rep.passed
        parts.append(f"delta={frac:g}: ratio {rep.details['ratio']:.2f}")
    ident = C.banded_weighted_bound(C.delta_kernel(hw), omega, window)
    ok &= ident.details["ratio"] >= 3
    parts.append(f"identity ratio {ident.details['ratio']:.2f}")
    _report(capsys, 7, "banded bound", ok, ", ".join(parts))


def test_criterion_08_pv_identities(capsys):
    cfg = RunConfig()
    coarse = suites.pv_identity_reports(ALPHA, cfg.grid.per_cell, cfg.grid.M, 1e-3)
    fine = suites.pv_identity_reports(ALPHA, 2 * cfg.grid.per_cell, 2 * cfg.grid.M, 1e-3)
    ratios = {k: coarse[k].lhs / fine[k].lhs for k in ("multiplier", "assembly")}
    ok = (coarse["multiplier"].lhs <= 1e-3 and coarse["assembly"].lhs <= 1e-3
          and all(3.0 <= r <= 5.0 for r in ratios.values())
          and coarse["support"].passed)
    _report(capsys, 8, "two-route identities", ok,
            f"multiplier {coarse['multiplier'].lhs:.2e} (ratio {ratios['multiplier']:.2f}), "
            f"assembly {coarse['assembly'].lhs:.2e} (ratio {ratios['assembly']:.2f}), "
            f"support leak {coarse['support'].lhs:.1e}")


def test_criterion_09_symbols(capsys):
    sq = H.check_square_identity(np.linspace(-50, 50, 2001), tol=1e-10)
    strip = H.check_strip_formula(np.linspace(-5, 5, 101), np.linspace(-0.9, 0.9, 37), tol=1e-10)
    at0 = H.eval_symbol(H.SymbolKind("psi"), 0.0)
    cfg = RunConfig()
    t0, h, M = G.default_grid(ALPHA, cfg.grid.M, cfg.grid.per_cell)
    pw = H.paley_wiener_decay(G.sample(H.fourier_psi_prime, h, M, t0), 0.5)
    ok = sq.passed and strip.passed and at0 == 1j and pw.passed
    _report(capsys, 9, "symbols", ok,
            f"square {sq.lhs:.1e}, strip {strip.lhs:.1e}, Psi(0) = {at0}, tails decreasing {pw.passed}")


def test_criterion_10_shift_model(capsys):
    cfg = RunConfig()
    worst_tr, ok = 0.0, True
    for name, fam in built_families().items():
        omega = W.build_weight(fam, 200)
        rep = S.translation_model_check(omega, suites.block_function(cfg, 6), 1e-10)
        worst_tr = max(worst_tr, rep.lhs)
        ok &= rep.passed
        ok &= S.shift_norm(omega) <= 1.0
        inv = S.check_inverse_bound(omega, W.submult_constant(fam))
        ok &= inv.lhs <= inv.rhs + 1e-9
    _report(capsys, 10, "shift model", ok, f"translation agreement {worst_tr:.1e} over {len(built_families())} weights")


def test_criterion_11_measures_and_gram(capsys, example):
    worst = 0.0
    for k in range(9):
        for r in (0.1, 0.3, 0.5):
            worst = max(worst, Me.halfplane_identity_check(lambda z, k=k: z**k, r, 1e-6).lhs)
    rep = Me.check_gram_blocks(suites.cell_bump(ALPHA, 64), example, 8, 1e-8, 1e-6)
    ok = worst <= 1e-6 and rep.lhs <= 1e-8 and rep.details["max_diag_rel_err"] <= 1e-6
    _report(capsys, 11, "half-plane identity and Gram blocks", ok,
            f"identity {worst:.1e}, off-diagonal {rep.lhs:.1e}, diagonal {rep.details['max_diag_rel_err']:.1e}")


def test_criterion_12_polynomial_scaffolding(capsys):
    rng = np.random.default_rng(2024)
    exact = True
    for _ in range(100):
        p = P.Poly(rng.standard_normal(21) + 1j * rng.standard_normal(21))
        exact &= np.array_equal(P.reconstruct(*P.even_odd_split(p)).coeffs, p.coeffs)
    ident, excess = 0.0, -math.inf
    for i in range(100):
        d = int(rng.integers(2, 7))
        R = P.random_unitary(d, rng) if i % 2 == 0 else P.random_nilpotent(d, rng)
        assert np.linalg.norm(R @ R, 2) <= 1 + 1e-12
        F = P.MatrixPolyFamily.random(2, int(rng.integers(1, 8)), rng)
        ident = max(ident, P.cpb_square_root_check(R, F).details["identity_residual"])
        split = P.check_split_matrix_inequalities(F)
        excess = max(excess, split.lhs / split.rhs - 1)
    ok = exact and ident <= 1e-12 and excess <= 1e-6
    _report(capsys, 12, "polynomial splitting", ok,
            f"reconstruction exact {exact}, block identity {ident:.1e}, split excess {excess:.1e}")
