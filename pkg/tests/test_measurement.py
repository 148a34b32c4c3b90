import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pcslab.measurement import (
    MeasurementConfig,
    approx_strong_small_gamma,
    approx_weak_coupling,
    capital_p,
    lambda_sq,
    output_state,
    success_probability,
    weak_value,
)
from pcslab.twomode import (
    PcsParams,
    TruncationSpec,
    displace_mode,
    fock_state,
    inner,
    moment,
    pcs_state,
)

ANOMALOUS = 8 * math.pi / 9


def test_config_validation():
    with pytest.raises(ValueError):
        MeasurementConfig(math.pi)
    with pytest.raises(ValueError):
        MeasurementConfig(-0.1)
    with pytest.raises(ValueError):
        MeasurementConfig(1.0, vartheta=7.0)
    with pytest.raises(ValueError):
        MeasurementConfig(1.0, coupling=-0.5)
    with pytest.raises(ValueError):
        MeasurementConfig(1.0, coupling=math.inf)


def test_weak_values():
    assert weak_value(MeasurementConfig(0.0)) == 0
    assert weak_value(MeasurementConfig(math.pi / 2)) == pytest.approx(1.0)
    assert weak_value(MeasurementConfig(ANOMALOUS)).real == pytest.approx(5.671, abs=5e-4)
    assert weak_value(MeasurementConfig(math.pi / 2, math.pi / 2)) == pytest.approx(1j)


def test_capital_p_trivial_values():
    assert capital_p(PcsParams(1.3, 2), 0.0) == 1.0
    assert capital_p(PcsParams(0, 0), 1.0) == pytest.approx(math.exp(-0.5), rel=1e-14)
    with pytest.raises(ValueError):
        capital_p(PcsParams(1.0), -1.0)


@pytest.mark.parametrize("g", [0.3, 1.0, 3.0])
@pytest.mark.parametrize("d", [0, 1, 2])
@pytest.mark.parametrize("coupling", [0.1, 0.6, 1.5])
def test_capital_p_is_displaced_overlap(g, d, coupling):
    p = PcsParams(g, d)
    phi = pcs_state(p, TruncationSpec(1e-14), coupling=coupling)
    ref = inner(phi, displace_mode(phi, "a", coupling)).real
    assert capital_p(p, coupling) == pytest.approx(ref, rel=1e-10)


def test_output_state_without_coupling_is_the_pcs():
    p = PcsParams(0.9, 1)
    out = output_state(p, MeasurementConfig(ANOMALOUS, 0.0, 0.0))
    np.testing.assert_allclose(out.coeffs, pcs_state(p).coeffs, atol=1e-12)


def test_output_state_for_unit_weak_value_is_one_branch():
    p = PcsParams(1.1, 0)
    out = output_state(p, MeasurementConfig(math.pi / 2, 0.0, 0.8))
    ref = displace_mode(pcs_state(p, coupling=0.8), "a", 0.4)
    assert abs(inner(ref, out)) ** 2 == pytest.approx(1.0, abs=1e-12)


def test_output_state_branch_reconstruction():
    p = PcsParams(0.7, 2)
    cfg = MeasurementConfig(1.2, 0.0, 0.9)
    out = output_state(p, cfg)
    phi = pcs_state(p, coupling=0.9)
    a = weak_value(cfg)
    lam = math.sqrt(lambda_sq(p, cfg))
    ref = 0.5 * lam * ((1 + a) * displace_mode(phi, "a", 0.45).coeffs + (1 - a) * displace_mode(phi, "a", -0.45).coeffs)
    np.testing.assert_allclose(out.coeffs, ref, atol=1e-13)


def test_number_difference_no_longer_sharp():
    out = output_state(PcsParams(0.5, 2), MeasurementConfig(ANOMALOUS, 0.0, 0.3))
    diff = (moment(out, 1, 1, 0, 0) - moment(out, 0, 0, 1, 1)).real
    assert abs(diff - 2) > 1e-3


@settings(max_examples=30, deadline=None)
@given(
    st.floats(0.05, 3.0),
    st.floats(0, 2 * math.pi),
    st.integers(0, 3),
    st.floats(0.0, 2.0),
    st.floats(0.0, 0.95 * math.pi),
    st.floats(0.0, 6.28),
)
def test_output_state_is_normalized(r, th, d, coupling, alpha, vartheta):
    # the state is built with the analytic lambda, so this checks P and lambda
    out = output_state(PcsParams(r * np.exp(1j * th), d), MeasurementConfig(alpha, vartheta, coupling))
    assert out.norm_sq() == pytest.approx(1.0, abs=1e-9)


def test_success_probability_reductions():
    p = PcsParams(1.4, 1)
    assert success_probability(p, MeasurementConfig(0.0)) == pytest.approx(1.0)
    cfg = MeasurementConfig(0.0, 0.0, 0.8)
    assert success_probability(p, cfg) == pytest.approx(0.5 * (1 + capital_p(p, 0.8)))


def test_success_probability_bounds_on_grid():
    for alpha in np.linspace(0, 0.99 * math.pi, 20):
        for coupling in np.linspace(0, 3, 20):
            for g in (0.1, 0.5, 1.0, 2.0, 4.0):
                ps = success_probability(PcsParams(g), MeasurementConfig(alpha, 0.0, coupling))
                assert 0.0 <= ps <= 1.0


def test_success_probability_grows_with_coupling_for_anomalous_weak_value():
    p = PcsParams(2.0)
    vals = [success_probability(p, MeasurementConfig(ANOMALOUS, 0.0, g)) for g in (0.3, 0.5, 0.7, 1.0)]
    assert np.all(np.diff(vals) > 0)


def test_weak_coupling_expansion():
    p = PcsParams(1.0)
    assert np.allclose(approx_weak_coupling(p, MeasurementConfig(1.0)).coeffs, pcs_state(p).coeffs)
    cfg = MeasurementConfig(math.pi / 2, 0.0, 0.1)
    infid = 1 - abs(inner(approx_weak_coupling(p, cfg), output_state(p, cfg))) ** 2
    assert infid < 1e-3
    small = MeasurementConfig(math.pi / 2, 0.0, 0.05)
    infid_small = 1 - abs(inner(approx_weak_coupling(p, small), output_state(p, small))) ** 2
    assert infid_small <= 0.25 * infid


def test_small_gamma_expansion_matches_full_state():
    p = PcsParams(0.05, 0)
    cfg = MeasurementConfig(math.pi / 3, 0.0, 3.0)
    assert abs(inner(approx_strong_small_gamma(p, cfg), output_state(p, cfg))) ** 2 >= 0.999


def test_small_gamma_expansion_reduces_to_even_cat():
    s = approx_strong_small_gamma(PcsParams(0.1, 0), MeasurementConfig(0.0, 0.0, 2.0))
    branch = s.coeffs[:, 0]
    vac = fock_state(0, 0, s.na_dim, 1)
    cat = displace_mode(vac, "a", 1.0).coeffs[:, 0] + displace_mode(vac, "a", -1.0).coeffs[:, 0]
    overlap = abs(np.vdot(cat, branch)) ** 2 / (np.vdot(cat, cat).real * np.vdot(branch, branch).real)
    assert overlap == pytest.approx(1.0, abs=1e-12)


def test_small_gamma_expansion_unit_weak_value_photon_branch():
    d = 1
    s = approx_strong_small_gamma(PcsParams(0.1, d), MeasurementConfig(math.pi / 2, 0.0, 1.0))
    branch = s.coeffs[:, 1]
    ref = displace_mode(fock_state(d + 1, 0, s.na_dim, 1), "a", 0.5).coeffs[:, 0]
    assert abs(np.vdot(ref, branch)) ** 2 / np.vdot(branch, branch).real == pytest.approx(1.0, abs=1e-12)
