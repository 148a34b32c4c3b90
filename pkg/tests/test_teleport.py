import math

import numpy as np
import pytest

from pcslab.measurement import MeasurementConfig, output_state
from pcslab.teleport import (
    MeshResolutionError,
    TeleportConfig,
    _coherent_column,
    avg_fidelity_closed,
    avg_fidelity_numeric,
    bob_state,
    fidelity_amplitude,
    output_fidelity_closed,
    state_fidelity,
)
from pcslab.twomode import PcsParams, TwoModeState, fock_state, pcs_state, vacuum

ANOMALOUS = 8 * math.pi / 9


def test_config_validation():
    with pytest.raises(ValueError):
        TeleportConfig(radial_max=0)
    with pytest.raises(ValueError):
        TeleportConfig(radial_count=4)
    with pytest.raises(ValueError):
        TeleportConfig(input_amp=complex(math.inf, 0))


def test_state_fidelity_basics():
    phi = pcs_state(PcsParams(1.0))
    assert state_fidelity(phi, phi) == pytest.approx(1.0)
    assert state_fidelity(phi, pcs_state(PcsParams(1.0, 1))) == 0.0
    with pytest.raises(ValueError):
        state_fidelity(phi, TwoModeState(np.ones((2, 2))))


def test_state_fidelity_drops_with_coupling():
    p = PcsParams(1.0)
    f = [output_fidelity_closed(p, MeasurementConfig(ANOMALOUS, 0.0, g)) for g in (0.0, 0.3, 1.0)]
    assert f[0] == pytest.approx(1.0, abs=1e-15)
    assert f[2] < f[1] < 1


@pytest.mark.parametrize("g,d,coupling,alpha", [(1.0, 0, 1.0, ANOMALOUS), (2.0, 1, 0.5, 1.0), (0.5, 2, 1.3, 0.2)])
def test_output_fidelity_closed_matches_grid(g, d, coupling, alpha):
    p, cfg = PcsParams(g, d), MeasurementConfig(alpha, 0.0, coupling)
    ref = state_fidelity(pcs_state(p, coupling=coupling), output_state(p, cfg))
    assert output_fidelity_closed(p, cfg) == pytest.approx(ref, abs=1e-12)


def test_bob_holds_vacuum_for_vacuum_channel():
    v = bob_state(vacuum(1, 1), 0, 0)
    assert abs(v[0]) == pytest.approx(1 / math.sqrt(math.pi))
    assert np.allclose(v[1:], 0)


def test_bob_state_matches_direct_contraction():
    s = output_state(PcsParams(1.0, 1), MeasurementConfig(1.0, 0.5, 0.7))
    alpha = 0.3 + 0.2j
    for beta in (0, 0.4 - 0.3j, -1.1j):
        v = bob_state(s, beta, alpha)
        assert np.vdot(_coherent_column(alpha, v.size), v) == pytest.approx(
            fidelity_amplitude(s, beta, alpha), abs=1e-12
        )


def test_dense_contraction_at_zero_outcome():
    # raw Fock sums: h_k = <k|alpha>, amplitude = sum psi_kl h_k conj(h_l) / sqrt(pi)
    s = pcs_state(PcsParams(0.8, 0))
    alpha = 0.5
    h = _coherent_column(alpha, max(s.shape))
    raw = sum(
        s.coeffs[k, l] * h[k] * np.conj(h[l]) for k in range(s.na_dim) for l in range(s.nb_dim)
    ) / math.sqrt(math.pi)
    assert fidelity_amplitude(s, 0, alpha) == pytest.approx(raw, abs=1e-13)


def test_outcome_density_integrates_to_one():
    s = pcs_state(PcsParams(1.0))
    x, w = np.polynomial.legendre.leggauss(40)
    total = 0.0
    for r, wr in zip(3 * (x + 1), 3 * w):
        for ph in np.arange(32) * 2 * np.pi / 32:
            v = bob_state(s, r * np.exp(1j * ph), 0)
            total += wr * r * (2 * np.pi / 32) * np.vdot(v, v).real
    assert total == pytest.approx(1.0, abs=1e-3)


def test_vacuum_channel_is_classical_limit():
    assert avg_fidelity_numeric(vacuum(1, 1)) == pytest.approx(0.5, abs=1e-10)
    assert avg_fidelity_numeric(vacuum(1, 1), TeleportConfig(1 + 0.5j)) == pytest.approx(0.5, abs=1e-10)


def test_fidelity_independent_of_input():
    s = pcs_state(PcsParams(1.22))
    a = avg_fidelity_numeric(s, TeleportConfig(0))
    b = avg_fidelity_numeric(s, TeleportConfig(1 + 0.5j))
    assert a == pytest.approx(b, abs=1e-3)


def test_mesh_gate_raises_when_unresolved():
    with pytest.raises(MeshResolutionError):
        avg_fidelity_numeric(pcs_state(PcsParams(1.0)), TeleportConfig(radial_max=1.5))
    with pytest.raises(MeshResolutionError):
        avg_fidelity_numeric(fock_state(12, 12, 13, 13), TeleportConfig(radial_count=8, angular_count=8))


def test_closed_form_agrees_with_integral_on_grid():
    for g in (0.5, 1.22, 3.0):
        for d in (0, 1):
            for coupling in (0.0, 0.5, 1.0):
                for alpha in (0.0, math.pi / 2, ANOMALOUS):
                    p, cfg = PcsParams(g, d), MeasurementConfig(alpha, 0.0, coupling)
                    closed = avg_fidelity_closed(p, cfg)
                    assert 0 <= closed <= 1
                    assert closed == pytest.approx(avg_fidelity_numeric(output_state(p, cfg)), abs=1e-4)


def test_teleport_peak_value():
    assert avg_fidelity_closed(PcsParams(1.22), MeasurementConfig(0.0)) == pytest.approx(0.7589, abs=5e-3)


def test_low_gamma_near_classical():
    f = avg_fidelity_closed(PcsParams(0.1), MeasurementConfig(0.0))
    assert 0.5 < f < 0.55


def test_no_difference_dominates_unit_difference():
    for g in np.linspace(0.2, 3, 8):
        f0 = avg_fidelity_closed(PcsParams(g, 0), MeasurementConfig(0.0))
        f1 = avg_fidelity_closed(PcsParams(g, 1), MeasurementConfig(0.0))
        assert f0 > f1
