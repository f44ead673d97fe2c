import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from quasilab import measures as Me
from quasilab import suites
from quasilab import weights as W


def test_measure_round_trip(example_family):
    mu = Me.LineMeasure.from_family(example_family)
    back = Me.to_halfplane(Me.to_disc(mu))
    assert np.max(np.abs(back.v - mu.v) / mu.v) <= 1e-15
    assert np.array_equal(back.a, mu.a)


def test_measure_validation():
    with pytest.raises(ValueError):
        Me.DiscMeasure([1.0], [1.0])
    with pytest.raises(ValueError):
        Me.DiscMeasure([1.0, 1.0], [0.2, 0.5])
    with pytest.raises(ValueError):
        Me.LineMeasure([1.0], [-1.0])


def test_circle_is_mapped_to_line():
    # z = r + (1-r) e^{i theta} on the circle goes to Im = r/(1-r)
    from quasilab.halfplane import cayley
    r = 0.3
    t = np.linspace(-40, 40, 81)
    z = cayley(t + 1j * r / (1 - r))
    assert np.allclose(np.abs(z - r), 1 - r, atol=1e-14)


@pytest.mark.parametrize("k", range(9))
@pytest.mark.parametrize("r", [0.1, 0.3, 0.5])
def test_halfplane_identity_monomials(k, r):
    rep = Me.halfplane_identity_check(lambda z: z**k, r, 1e-6)
    assert rep.passed
    # mean of z^k over the circle |z - r| = 1 - r is r^k (1 - r)
    assert rep.details["circle"] == pytest.approx(r**k * (1 - r), rel=1e-13)


def test_halfplane_identity_exponential():
    rep = Me.halfplane_identity_check(lambda z: np.exp(2 * z), 0.4, 1e-6)
    assert rep.passed


def test_gram_blocks(example_family):
    f = suites.cell_bump(1.0, 64)
    rep = Me.check_gram_blocks(f, example_family, 6)
    assert rep.passed
    assert rep.details["max_diag_rel_err"] <= 1e-10
    assert rep.lhs <= 1e-12


def test_gram_block_validation(example_family):
    f = suites.cell_bump(1.0, 64)
    with pytest.raises(ValueError):
        Me.gram_block(0, 0, type(f)(-0.5, f.h, f.values), f, example_family)


@settings(max_examples=15, deadline=None)
@given(n=st.integers(0, 20), a=st.floats(0.1, 0.9))
def test_phi_sandwich_on_diagonal(n, a):
    fam = W.shifted_geometric(a, 16, 1.0)
    s = np.linspace(0, 1, 17)
    omega = W.build_weight(fam, n + 2)
    lp = W.log_phi_alpha(fam, n, s)
    assert np.all(lp <= -omega.log_omega2_neg[n] + 1e-12)
    assert np.all(lp >= -omega.log_omega2_neg[n + 1] - 1e-12)
