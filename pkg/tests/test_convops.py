import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from quasilab import convops as C
from quasilab import grid as G
from quasilab import halfplane as H
from quasilab import suites
from quasilab import weights as W

from conftest import smooth_bump


def test_gaussian_self_convolution():
    h = 1 / 32
    f = G.sample(lambda t: np.exp(-t**2), h, 1024)
    k = C.kernel_from_function(lambda t: np.exp(-t**2), h, 513)
    out = C.convolve(k, f)
    exact = math.sqrt(math.pi / 2) * np.exp(-f.t**2 / 2)
    assert np.max(np.abs(out.values - exact)) <= 1e-12


def test_fft_matches_direct(rng):
    h = 1 / 16
    f = G.GridFunction(-8.0, h, smooth_bump(np.arange(256) * h - 8.0, 0.0, 4.0) * rng.standard_normal(256))
    k = C.kernel_from_function(lambda t: np.exp(-np.abs(t)), h, 129)
    a = C.convolve(k, f, "fft").values
    b = C.convolve(k, f, "direct").values
    assert np.max(np.abs(a - b)) <= 1e-12
    with pytest.raises(ValueError):
        C.convolve(k, f, "spectral")


def test_overflow_warning():
    h = 1 / 16
    f = G.sample(lambda t: np.ones_like(t), h, 64)
    k = C.kernel_from_function(lambda t: np.ones_like(t), h, 33)
    with pytest.warns(C.WindowOverflowWarning):
        _, frac = C.convolve(k, f, return_overflow=True)
    assert frac > 0


def test_delta_kernel_is_identity():
    f = G.sample(lambda t: np.exp(-t**2), 0.1, 201)
    out = C.convolve(C.delta_kernel(0.1, 2.0), f)
    assert np.allclose(out.values, 2 * f.values, atol=1e-15)


def test_young_bound_unit_weight_and_family(example_family):
    hw = 1 / 16
    window = (-16.0, hw, 512)
    omega = W.build_weight(example_family, 64)
    k = C.kernel_from_function(lambda t: np.exp(-t**2), hw, 129)
    unit = C.check_young_bound(k, W.StepWeight.unit(1.0, 64), 1.0, window)
    assert unit.passed
    # unit weight: the bound is the l1 norm and the estimate is within 1%
    assert unit.lhs == pytest.approx(unit.rhs, rel=1e-2)
    step = W.StepWeight.from_weight(omega)
    C_w = W.submult_constant(example_family) ** 2 * float(omega.omega(np.array([-2]))[0]) ** 2
    assert C.check_young_bound(k, step, C_w, window).passed


def test_young_bound_rejects_bad_constant(example_family):
    omega = W.build_weight(example_family, 64)
    k = C.delta_kernel(1 / 16)
    with pytest.raises(ValueError):
        C.check_young_bound(k, W.StepWeight.from_weight(omega), 0.5, (-4.0, 1 / 16, 128))


def test_opnorm_dense_limit():
    with pytest.raises(ValueError):
        C.weighted_opnorm_estimate(C.delta_kernel(0.1), W.StepWeight.unit(1.0, 8), (0.0, 0.1, 5000))


def test_banded_bound(example_family):
    omega = W.build_weight(example_family, 64)
    hw = 1 / 16
    k = C.kernel_from_function(lambda t: smooth_bump(t, 0.0, 0.5), hw, 257, 0.5, "compact")
    rep = C.banded_weighted_bound(k, omega, (-16.0, hw, 512))
    assert rep.passed
    wide = C.kernel_from_function(lambda t: smooth_bump(t, 0.0, 1.5), hw, 257, 1.5, "compact")
    with pytest.raises(ValueError):
        C.banded_weighted_bound(wide, omega, (-16.0, hw, 512))


def test_symbol_sup_of_delta():
    assert C.symbol_sup(C.delta_kernel(0.25, 3.0)) == pytest.approx(3.0, rel=1e-15)


def test_c_psi_frozen():
    # mpmath: int_{|s|>1/2} F(Psi')(s)/s ds
    h = 1 / 64
    psi = C.kernel_from_function(H.fourier_psi_prime, h, 2**12)
    split = C.make_singular_split(psi, 0.5, H.fourier_psi_prime)
    assert split.c_psi.real == pytest.approx(-1.0271866991662421741, rel=1e-11)
    assert abs(split.c_psi.imag) <= 1e-13
    assert split.c_psi_grid.real == pytest.approx(split.c_psi.real, rel=1e-3)


def test_singular_split_rejects_off_grid_delta():
    psi = C.kernel_from_function(H.fourier_psi_prime, 1 / 64, 1024)
    with pytest.raises(ValueError):
        C.make_singular_split(psi, 0.501)


def test_psi1_discrete_matches_continuum_at_low_frequency():
    psi = C.kernel_from_function(H.fourier_psi_prime, 1 / 256, 2**13)
    split = C.make_singular_split(psi, 0.5, H.fourier_psi_prime)
    xi = np.linspace(-4, 4, 33)
    assert np.max(np.abs(C.psi1_discrete(split, xi) - C.psi1(split, xi))) <= 1e-3
    assert C.psi1(split, np.zeros(1))[0] == 0


def test_pv_identities_second_order():
    coarse = suites.pv_identity_reports(1.0, 32, 2**13, 1e-3)
    fine = suites.pv_identity_reports(1.0, 64, 2**14, 1e-3)
    for key in ("multiplier", "assembly"):
        assert coarse[key].passed and fine[key].passed
        assert 3.0 <= coarse[key].lhs / fine[key].lhs <= 5.0
    assert coarse["support"].passed


def test_mult_conv_duality_grid_check():
    f = G.sample(lambda t: np.exp(-t**2), 1 / 16, 512)
    fh = G.inverse_transform(f)
    sym = fh.with_values(np.exp(-fh.t**2 / 4))
    assert C.mult_conv_duality_check(sym, f).passed
    with pytest.raises(ValueError):
        C.mult_conv_duality_check(G.GridFunction(0.0, 1.0, np.ones(4)), f)


@settings(max_examples=20, deadline=None)
@given(shift=st.integers(-20, 20))
def test_convolution_commutes_with_translation(shift):
    h = 1 / 16
    f = G.sample(lambda t: np.exp(-t**2), h, 512)
    k = C.kernel_from_function(lambda t: np.exp(-2 * np.abs(t)) * np.cos(t), h, 257)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", C.WindowOverflowWarning)
        a = C.convolve(k, G.translate(f, shift * h)).values
        b = G.translate(C.convolve(k, f), shift * h).values
    assert np.max(np.abs(a - b)[64:-64]) <= 1e-12
