import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from quasilab import weights as W

# log omega^2(-n-1) for the shifted-geometric family (a = 1/2, K = 64, alpha = 1),
# evaluated with mpmath at 50 digits
FROZEN_LOG_OMEGA2 = {
    1: 1.980126757141620412115542,
    10: 12.64308915245121735260046,
    100: 76.18735850118404649153869,
    499: 281.9629420570044304284522,
}


def test_frozen_log_weights_match_high_precision(example_family):
    omega = W.build_weight(example_family, 500)
    for n, ref in FROZEN_LOG_OMEGA2.items():
        assert omega.log_omega2(np.array([-n - 1]))[0] == pytest.approx(ref, rel=1e-13)


def test_omega_is_one_on_nonnegative_indices(example_weight):
    assert np.all(example_weight.omega(np.arange(0, 50)) == 1.0)
    assert example_weight.omega(np.array([-1]))[0] == 1.0


def test_omega_overflow_is_reported():
    omega = W.build_weight(W.one_term(1.0, 3.0, 1.0), 400)
    with pytest.raises(OverflowError):
        omega.omega(np.arange(-400, 0))
    assert np.all(np.isfinite(omega.log_omega(np.arange(-400, 0))))


def test_index_below_truncation_raises(example_weight):
    with pytest.raises(IndexError):
        example_weight.log_omega2(np.array([-201]))


@pytest.mark.parametrize("a1,v1,alpha", [(1.0, 1.0, 1.0), (0.7, 0.9, 1.3), (0.3, 0.2, 0.5)])
def test_one_term_closed_form(a1, v1, alpha):
    omega = W.build_weight(W.one_term(a1, v1, alpha), 501)
    n = np.arange(501)
    got = omega.omega(-n - 1)
    mp.mp.dps = 40
    ref = np.array([float(mp.e ** (mp.mpf(alpha) * k * mp.mpf(v1)) / mp.sqrt(mp.mpf(a1))) for k in n])
    assert np.max(np.abs(got - ref) / ref) <= 1e-12


@pytest.mark.parametrize("bad", [
    dict(a=[0.5, 0.3], v=[1.0, 1.0]),
    dict(a=[0.5, -0.1], v=[2.0, 1.0]),
    dict(a=[0.5], v=[0.0]),
])
def test_invalid_families_rejected(bad):
    with pytest.raises(ValueError):
        W.explicit(bad["a"], bad["v"], 1.0)


def test_normalized_family_must_not_exceed_unit_mass():
    with pytest.raises(ValueError):
        W.WeightFamily(np.array([0.7, 0.6]), np.array([2.0, 1.0]), 1.0, normalized=True)


def test_submultiplicativity_example(example_weight, example_family):
    rep = W.check_submultiplicativity(example_weight, W.submult_constant(example_family))
    assert rep.passed
    assert rep.lhs <= 1 + 1e-12


def test_submultiplicativity_fails_with_too_small_constant(example_weight):
    assert not W.check_submultiplicativity(example_weight, 0.5).passed


def test_step_submultiplicativity(example_weight, example_family):
    step = W.StepWeight.from_weight(example_weight)
    om2 = float(example_weight.omega(np.array([-2]))[0])
    assert W.check_step_submultiplicativity(step, W.submult_constant(example_family), om2).passed


# k_eps <= K uses the truncated tail sum_{k_eps <= k <= 64}; beyond K the
# infinite tail of the generator
@pytest.mark.parametrize("eps,k_eps,log_c", [
    (1.0, 7, 4.1588830833596718565 - math.log1p(-2.0**-58)),
    (0.5, 54, 36.737288970175210274),
    (0.1, 485165195, 336290886.32691889467),
])
def test_subexp_constants_against_scan(example_family, eps, k_eps, log_c):
    sc = W.subexp_constant(example_family, eps)
    assert sc.k_eps == k_eps
    assert sc.log_C == pytest.approx(log_c, rel=1e-12)


def test_subexp_constant_needs_generator_beyond_truncation():
    fam = W.explicit([0.5, 0.25], [2.0, 1.0], 1.0)
    with pytest.raises(ValueError):
        W.subexp_constant(fam, 0.1)


def test_subexponential_bound_holds(example_family):
    omega = W.build_weight(example_family, 500)
    for eps in (1.0, 0.5, 0.1):
        rep = W.check_subexponential(omega, W.subexp_constant(example_family, eps))
        assert rep.passed and rep.details["violations"] == 0


def test_phi_sandwich(example_family):
    rep = W.check_phi_sandwich(example_family, 100)
    assert rep.passed
    assert rep.details["tightness_at_alpha"] <= 1e-10


def test_c_sequence_is_log_two_for_halving_family():
    fam = W.shifted_geometric(0.5, 1100, 1.0)
    c = W.c_sequence(fam, np.arange(1, 1001))
    assert np.max(np.abs(c - math.log(2)) / math.log(2)) <= 1e-12


def test_threshold_chain_threshold_matches_scan():
    fam = W.shifted_geometric(0.5, 1100, 1.0)
    rep = W.threshold_chain_check(fam, lambda n: n, 1000)
    assert rep.passed
    # direct scan: last n where 2 v_n > log 2, plus one
    n = np.arange(1, 1001)
    cond = 2 / np.log(n + 1) <= math.log(2)
    assert rep.details["n0"] == int(n[np.nonzero(~cond)[0][-1] + 1])


def test_threshold_chain_not_applicable_past_truncation(example_family):
    rep = W.threshold_chain_check(example_family, lambda n: n, 100)
    assert rep.details["applicable"] is False


def test_series_integral_envelope_for_simple_profiles():
    for M in (lambda u: np.ones_like(np.asarray(u, float)), lambda u: np.asarray(u, float),
              lambda u: np.log1p(np.asarray(u, float))):
        assert W.series_integral_check(M, 1.0, 50).passed


def test_series_integral_rejects_decreasing_profile():
    with pytest.raises(ValueError):
        W.series_integral_check(lambda u: -np.asarray(u, float), 1.0, 10)


@settings(max_examples=30, deadline=None)
@given(
    a=st.lists(st.floats(0.01, 1.0), min_size=1, max_size=6),
    alpha=st.floats(0.2, 2.0),
)
def test_random_families_submultiplicative(a, alpha):
    a = np.array(a) / (sum(a) * 1.0000001)
    v = 1.0 / np.arange(1, a.size + 1)
    fam = W.explicit(a, v, alpha)
    omega = W.build_weight(fam, 60)
    assert np.all(np.diff(omega.log_omega2_neg) >= -1e-12)
    assert W.check_submultiplicativity(omega, W.submult_constant(fam)).passed


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-800, 50), min_size=1, max_size=40))
def test_log_sum_matches_mpmath(logs):
    mp.mp.dps = 30
    ref = float(mp.log(mp.fsum(mp.e ** mp.mpf(x) for x in logs)))
    assert W._log_sum(np.array(logs)) == pytest.approx(ref, rel=1e-13, abs=1e-13)
