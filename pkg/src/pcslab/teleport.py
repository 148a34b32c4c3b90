"""State overlap and continuous-variable teleportation through a two-mode channel.

Alice holds mode a of the channel and the coherent input in mode c. She
projects a and c onto the EPR basis ``|beta> = pi^(-1/2) sum_k D_c(beta)|k>_a|k>_c``
and Bob displaces mode b by ``beta``. The average fidelity is

    F_av = int d^2 beta |<alpha_c| Psi_b(beta)>|^2

with ``Psi_b`` the unnormalised conditional state, so the outcome density
is already folded in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .measurement import MeasurementConfig, branch_weights, capital_p, lambda_sq
from .series import series_cutoff
from .specfun import DEFAULT_CONTROL, SeriesControl, displacement_matrix, log_factorial_array
from .twomode import (
    PcsParams,
    TruncationSpec,
    TwoModeState,
    headroom_needed,
    inner,
    pcs_log_amplitudes,
)

__all__ = [
    "MeshResolutionError",
    "TeleportConfig",
    "state_fidelity",
    "output_fidelity_closed",
    "bob_state",
    "fidelity_amplitude",
    "avg_fidelity_numeric",
    "avg_fidelity_closed",
    "channel_amplitudes",
]

# mesh-doubling gate on the numerical integral
MESH_TOL = 1e-3
# integrand (times r) allowed at the outer edge of the radial mesh
_EDGE_TOL = 1e-8


class MeshResolutionError(RuntimeError):
    """The beta mesh does not resolve the fidelity integrand."""


@dataclass(frozen=True)
class TeleportConfig:
    """Coherent input amplitude and the polar mesh over measurement outcomes.

    The mesh is centred on ``input_amp``: Gauss-Legendre nodes in the
    radius on ``[0, radial_max]`` and equally spaced angles.
    """

    input_amp: complex = 0j
    radial_max: float = 6.0
    radial_count: int = 48
    angular_count: int = 64

    def __post_init__(self):
        amp = complex(self.input_amp)
        if not (math.isfinite(amp.real) and math.isfinite(amp.imag)):
            raise ValueError(f"input_amp must be finite, got {self.input_amp!r}")
        object.__setattr__(self, "input_amp", amp)
        if not (self.radial_max > 0 and math.isfinite(self.radial_max)):
            raise ValueError(f"radial_max must be positive, got {self.radial_max!r}")
        for name in ("radial_count", "angular_count"):
            v = getattr(self, name)
            if int(v) != v or v < 8:
                raise ValueError(f"{name} must be an integer >= 8, got {v!r}")
            object.__setattr__(self, name, int(v))


def state_fidelity(s1: TwoModeState, s2: TwoModeState) -> float:
    """``|<s1|s2>|^2`` for normalized states."""
    if not (s1.normalized and s2.normalized):
        raise ValueError("state_fidelity needs normalized states")
    return min(abs(inner(s1, s2)) ** 2, 1.0)


def output_fidelity_closed(
    p: PcsParams, cfg: MeasurementConfig, ctl: SeriesControl = DEFAULT_CONTROL
) -> float:
    """``|<phi|Psi>|^2`` for the measured PCS.

    Both branches overlap the PCS by the same real number ``P(G/2)``, so
    ``<phi|Psi> = lambda P(G/2)``.
    """
    ov = capital_p(p, 0.5 * cfg.coupling, ctl)
    return min(lambda_sq(p, cfg, ctl) * ov * ov, 1.0)


def _coherent_column(amp: complex, dim: int) -> np.ndarray:
    k = np.arange(dim)
    if amp == 0:
        v = np.zeros(dim, dtype=complex)
        v[0] = 1.0
        return v
    logmag = k * math.log(abs(amp)) - 0.5 * log_factorial_array(k) - 0.5 * abs(amp) ** 2
    return np.exp(logmag + 1j * k * np.angle(amp))


def _input_overlaps(beta: complex, alpha: complex, dim: int) -> np.ndarray:
    """``h_k = <k|D(-beta)|alpha>`` for ``k < dim`` by matrix application."""
    src = max(dim, math.ceil(abs(alpha) ** 2 + 10 * abs(alpha) + 10)) + headroom_needed(beta)
    return displacement_matrix(-beta, dim, src) @ _coherent_column(alpha, src)


def bob_state(
    channel: TwoModeState, beta_meas: complex, input_amp: complex, t: TruncationSpec = TruncationSpec()
) -> np.ndarray:
    """Bob's conditional mode-b amplitudes for outcome ``beta_meas``, after his
    displacement ``D_b(beta_meas)``. Unnormalised: the squared norm is the
    outcome density per unit ``d^2 beta``."""
    if not channel.normalized:
        raise ValueError("bob_state needs a normalized channel")
    beta = complex(beta_meas)
    h = _input_overlaps(beta, complex(input_amp), channel.na_dim)
    cond = (h @ channel.coeffs) / math.sqrt(math.pi)
    margin = headroom_needed(beta) if t.margin is None else t.margin
    dim = channel.highest_occupied("b") + 1 + margin
    padded = np.zeros(max(dim, cond.size), dtype=complex)
    padded[: cond.size] = cond
    return displacement_matrix(beta, padded.size) @ padded


def fidelity_amplitude(channel: TwoModeState, beta_meas: complex, input_amp: complex) -> complex:
    """``<alpha_c|Psi_b(beta)>`` as the direct contraction
    ``pi^(-1/2) sum_kl psi_kl h_k conj(h_l)``."""
    beta, alpha = complex(beta_meas), complex(input_amp)
    dim = max(channel.shape)
    h = _input_overlaps(beta, alpha, dim)
    c = channel.coeffs
    return complex(h[: c.shape[0]] @ c @ np.conj(h[: c.shape[1]])) / math.sqrt(math.pi)


def _mesh_integral(psi: np.ndarray, radial_max: float, nr: int, nphi: int) -> tuple[float, float]:
    """Integral of ``|amplitude|^2`` over the disc of radius ``radial_max`` and
    the integrand (angular average, times r) at the outer edge.

    Relative to the input the outcome enters only through ``z = alpha - beta``,
    and ``h_k`` reduces to the coherent amplitude of ``z`` up to a phase that
    cancels in ``h_k conj(h_l)``.
    """
    x, w = np.polynomial.legendre.leggauss(nr)
    r = 0.5 * radial_max * (x + 1.0)
    wr = 0.5 * radial_max * w
    phi = 2.0 * np.pi * np.arange(nphi) / nphi
    na, nb = psi.shape
    ka, kb = np.arange(na), np.arange(nb)
    ea = np.exp(1j * np.outer(phi, ka))
    eb = np.exp(-1j * np.outer(phi, kb))
    lfa, lfb = log_factorial_array(ka), log_factorial_array(kb)

    def ring(rad: float) -> float:
        # mean over angles of |amplitude|^2 on the circle |z| = rad
        if rad == 0.0:
            ua = (ka == 0).astype(float)
            ub = (kb == 0).astype(float)
        else:
            lr = math.log(rad)
            ua = np.exp(ka * lr - 0.5 * lfa - 0.5 * rad * rad)
            ub = np.exp(kb * lr - 0.5 * lfb - 0.5 * rad * rad)
        m = psi * np.outer(ua, ub)
        amp = np.einsum("jk,kl,jl->j", ea, m, eb) / math.sqrt(math.pi)
        return float(np.mean(np.abs(amp) ** 2))

    total = 0.0
    for rad, wt in zip(r, wr):
        total += wt * rad * ring(rad)
    edge = radial_max * ring(radial_max)
    return 2.0 * np.pi * total, 2.0 * np.pi * edge


def avg_fidelity_numeric(channel: TwoModeState, cfg: TeleportConfig = TeleportConfig()) -> float:
    """Average fidelity by integration over the outcome plane.

    Runs the mesh and its doubled version; disagreement above ``1e-3`` or a
    non-negligible integrand at the mesh edge raises :class:`MeshResolutionError`.
    """
    if not channel.normalized:
        raise ValueError("avg_fidelity_numeric needs a normalized channel")
    psi = channel.coeffs
    coarse, _ = _mesh_integral(psi, cfg.radial_max, cfg.radial_count, cfg.angular_count)
    fine, edge = _mesh_integral(psi, cfg.radial_max, 2 * cfg.radial_count, 2 * cfg.angular_count)
    if abs(fine - coarse) > MESH_TOL:
        raise MeshResolutionError(
            f"mesh doubling moved F_av from {coarse:.6g} to {fine:.6g}; refine the beta mesh"
        )
    if edge > _EDGE_TOL:
        raise MeshResolutionError(
            f"integrand {edge:.3g} at radius {cfg.radial_max} is not negligible; raise radial_max"
        )
    return min(max(fine, 0.0), 1.0)


def channel_amplitudes(
    p: PcsParams, cfg: MeasurementConfig, ctl: SeriesControl = DEFAULT_CONTROL
) -> np.ndarray:
    """``psi_kl = <k, l|Psi>`` of the measured PCS from the analytic
    displaced-Fock amplitudes ``<k|D(+-G/2)|l + delta>``."""
    n_max = series_cutoff(p, ctl)
    logc, phase = pcs_log_amplitudes(p, n_max)
    c = np.exp(logc + 1j * phase)
    u = 0.5 * cfg.coupling
    cols = n_max + p.delta + 1
    rows = cols + (headroom_needed(u) if u else 0)
    tp, tm = branch_weights(cfg)
    if u:
        mix = tp * displacement_matrix(u, rows, cols) + tm * displacement_matrix(-u, rows, cols)
    else:
        mix = (tp + tm) * np.eye(rows, cols)
    # column n + delta of the mixed displacement carries the PCS term c_n
    psi = 0.5 * math.sqrt(lambda_sq(p, cfg, ctl)) * mix[:, p.delta:] * c[None, :]
    return psi


def avg_fidelity_closed(
    p: PcsParams, cfg: MeasurementConfig, ctl: SeriesControl = DEFAULT_CONTROL
) -> float:
    r"""Average fidelity for the measured PCS as a finite double series.

    The angular integral keeps only pairs with ``k - l = k' - l'`` and the
    radial one is a Gamma integral::

        F_av = 1/2 sum psi_kl conj(psi_k'l') (k+l')! / (2^(k+l') sqrt(k! l! k'! l'!))
    """
    psi = channel_amplitudes(p, cfg, ctl)
    na, nb = psi.shape
    lf = log_factorial_array(np.arange(na + nb))
    total = 0.0
    for d in range(-(nb - 1), na):
        l = np.arange(max(0, -d), min(nb, na - d))
        k = l + d
        v = psi[k, l]
        s = k[:, None] + l[None, :]
        logt = lf[s] - s * math.log(2.0) - 0.5 * (lf[k] + lf[l])[:, None] - 0.5 * (lf[k] + lf[l])[None, :]
        total += float(np.real(v @ np.exp(logt) @ np.conj(v)))
    return min(max(0.5 * total, 0.0), 1.0)
