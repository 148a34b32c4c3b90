import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pcslab.specfun import bessel_i
from pcslab.twomode import (
    PcsParams,
    TruncationError,
    TruncationSpec,
    TwoModeState,
    apply_ladder,
    coherent_state,
    displace_mode,
    fock_state,
    inner,
    joint_parity_expectation,
    moment,
    pcs_state,
    vacuum,
)


def test_pcs_params_validation():
    assert PcsParams(1, 2).gamma == 1 + 0j
    with pytest.raises(ValueError):
        PcsParams(1.0, -1)
    with pytest.raises(ValueError):
        PcsParams(1.0, 0.5)
    with pytest.raises(ValueError):
        PcsParams(math.nan)


def test_truncation_spec_validation():
    with pytest.raises(ValueError):
        TruncationSpec(tail_prob=1e-3)
    with pytest.raises(ValueError):
        TruncationSpec(margin=-1)


def test_state_is_frozen_copy():
    c = np.zeros((2, 2))
    c[0, 0] = 1
    s = TwoModeState(c, normalized=True)
    c[0, 0] = 5
    assert s.coeffs[0, 0] == 1
    with pytest.raises(ValueError):
        s.coeffs[0, 0] = 2


def test_normalized_flag_is_checked():
    with pytest.raises(ValueError):
        TwoModeState(np.ones((2, 2)), normalized=True)
    with pytest.raises(ValueError):
        TwoModeState(np.ones(3))


def test_pcs_lives_on_the_delta_diagonal():
    s = pcs_state(PcsParams(0.8 + 0.3j, 2))
    na, nb = np.nonzero(np.abs(s.coeffs) > 0)
    assert np.all(na - nb == 2)
    assert abs(s.norm_sq() - 1) < 1e-12


def test_pcs_gamma_zero_limit():
    s = pcs_state(PcsParams(0, 3))
    assert abs(s.coeffs[3, 0]) == pytest.approx(1.0)
    assert s.norm_sq() == pytest.approx(1.0)


def test_pcs_mean_number_matches_bessel_ratio():
    g = 1.7
    s = pcs_state(PcsParams(g, 1))
    expected = g * bessel_i(2, 2 * g) / bessel_i(1, 2 * g)
    assert moment(s, 0, 0, 1, 1).real == pytest.approx(expected, rel=1e-10)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.05, 4.0), st.floats(0, 2 * math.pi), st.integers(0, 3))
def test_pcs_pair_eigenvalue_and_number_difference(r, th, d):
    g = r * np.exp(1j * th)
    s = pcs_state(PcsParams(g, d))
    assert moment(s, 0, 1, 0, 1) == pytest.approx(g, abs=1e-10)
    diff = moment(s, 1, 1, 0, 0) - moment(s, 0, 0, 1, 1)
    assert diff.real == pytest.approx(d, abs=1e-10)
    assert joint_parity_expectation(s) == pytest.approx((-1) ** d, abs=1e-12)


def test_ladder_operators_on_fock():
    s = fock_state(2, 1, 5, 4)
    low = apply_ladder(s, "a", "lower")
    assert low.coeffs[1, 1] == pytest.approx(math.sqrt(2))
    up = apply_ladder(s, "b", "raise")
    assert up.coeffs[2, 2] == pytest.approx(math.sqrt(2))


def test_raise_refuses_to_overflow():
    with pytest.raises(TruncationError):
        apply_ladder(fock_state(2, 0, 3, 1), "a", "raise")
    with pytest.raises(ValueError):
        apply_ladder(fock_state(0, 0), "c", "raise")
    with pytest.raises(ValueError):
        apply_ladder(fock_state(0, 0), "a", "up")


def test_displace_vacuum_gives_coherent_state():
    amp = 0.9 - 0.4j
    s = displace_mode(vacuum(40, 1), "a", amp)
    ref = coherent_state(amp, 0, 40, 1)
    assert abs(inner(ref, s)) == pytest.approx(1.0, abs=1e-12)


def test_displace_headroom_check():
    with pytest.raises(TruncationError):
        displace_mode(fock_state(3, 0, 6, 1), "a", 1.0)


def test_displacements_compose_to_identity():
    s = pcs_state(PcsParams(1.0, 1), coupling=2.0)
    back = displace_mode(displace_mode(s, "a", 0.7), "a", -0.7)
    np.testing.assert_allclose(back.coeffs, s.coeffs, atol=1e-12)


def test_inner_pads_grids():
    a = fock_state(1, 0, 2, 1)
    b = fock_state(1, 0, 5, 3)
    assert inner(a, b) == pytest.approx(1.0)


def test_moment_validation_and_coherent_values():
    s = coherent_state(0.6, 1.2j, 40, 40)
    assert moment(s, 0, 1, 0, 0) == pytest.approx(0.6, abs=1e-12)
    assert moment(s, 0, 0, 0, 1) == pytest.approx(1.2j, abs=1e-12)
    assert moment(s, 2, 2, 0, 0).real == pytest.approx(0.6**4, abs=1e-12)
    with pytest.raises(ValueError):
        moment(s, -1, 0, 0, 0)


def test_marginals_and_highest_occupied():
    s = fock_state(3, 1, 6, 4)
    np.testing.assert_allclose(s.marginal("a"), np.eye(6)[3])
    assert s.highest_occupied("a") == 3
    assert s.highest_occupied("b") == 1
