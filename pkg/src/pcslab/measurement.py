"""Postselected von Neumann measurement on mode a of a pair coherent state.

The pointer (mode a) couples to a polarisation qubit through
``H = g sigma_x (x) P_x``. After preselecting
``cos(alpha/2)|H> + exp(i vartheta) sin(alpha/2)|V>`` and postselecting
``|H>``, the pointer is left in::

    Psi = (lambda/2) [(1 + A) D_a(G/2) + (1 - A) D_a(-G/2)] phi

with ``A`` the weak value of ``sigma_x`` and ``G`` the coupling in units of
the pointer width.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .series import overlap_displaced
from .specfun import DEFAULT_CONTROL, SeriesControl
from .twomode import (
    _NORM_TOL,
    PcsParams,
    TruncationError,
    TruncationSpec,
    TwoModeState,
    apply_ladder,
    default_margin,
    displace_mode,
    fock_state,
    pcs_state,
)

__all__ = [
    "MeasurementConfig",
    "weak_value",
    "branch_weights",
    "capital_p",
    "lambda_sq",
    "output_state",
    "success_probability",
    "approx_weak_coupling",
    "approx_strong_small_gamma",
]


@dataclass(frozen=True)
class MeasurementConfig:
    """Preselection angles and coupling strength.

    Parameters
    ----------
    alpha : float
        Polar angle of the preselected qubit state, in [0, pi).
    vartheta : float
        Relative phase of the preselected state, in [0, 2 pi).
    coupling : float
        Interaction strength ``g t / sigma``, non-negative.
    """

    alpha: float
    vartheta: float = 0.0
    coupling: float = 0.0

    def __post_init__(self):
        for name in ("alpha", "vartheta", "coupling"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v!r}")
            object.__setattr__(self, name, v)
        if not (0.0 <= self.alpha < math.pi):
            raise ValueError(f"alpha must lie in [0, pi), got {self.alpha!r}")
        if not (0.0 <= self.vartheta < 2.0 * math.pi):
            raise ValueError(f"vartheta must lie in [0, 2 pi), got {self.vartheta!r}")
        if self.coupling < 0.0:
            raise ValueError(f"coupling must be non-negative, got {self.coupling!r}")


def weak_value(cfg: MeasurementConfig) -> complex:
    """``exp(i vartheta) tan(alpha/2)``."""
    if cfg.alpha >= math.pi:
        raise ValueError("alpha = pi puts the weak value at the tangent pole")
    return complex(math.cos(cfg.vartheta), math.sin(cfg.vartheta)) * math.tan(0.5 * cfg.alpha)


def branch_weights(cfg: MeasurementConfig) -> tuple[complex, complex]:
    """``(1 + A, 1 - A)``: amplitudes of the ``D(+G/2)`` and ``D(-G/2)`` branches."""
    a = weak_value(cfg)
    return 1.0 + a, 1.0 - a


def capital_p(p: PcsParams, coupling: float, ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """Overlap ``<phi|D_a(coupling)|phi>`` of the PCS with its displaced copy.

    Summed as the PCS average of ``exp(-G^2/2) L_{n+delta}(G^2)``; it is real
    because the displacement is along the real axis.
    """
    coupling = float(coupling)
    if not (coupling >= 0.0 and math.isfinite(coupling)):
        raise ValueError(f"coupling must be finite and non-negative, got {coupling!r}")
    if coupling == 0.0:
        return 1.0
    return overlap_displaced(p, coupling, ctl)


def lambda_sq(p: PcsParams, cfg: MeasurementConfig, ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """Square of the output-state normalisation ``2 / [1 + |A|^2 + (1 - |A|^2) P]``."""
    a2 = abs(weak_value(cfg)) ** 2
    return 2.0 / (1.0 + a2 + (1.0 - a2) * capital_p(p, cfg.coupling, ctl))


def output_state(
    p: PcsParams,
    cfg: MeasurementConfig,
    t: TruncationSpec = TruncationSpec(),
    ctl: SeriesControl = DEFAULT_CONTROL,
) -> TwoModeState:
    """Pointer state after the postselected measurement, on a Fock grid.

    Built from two displaced copies of the PCS and normalised with the
    analytic ``lambda``, so a unit norm on the grid confirms both the series
    for ``P`` and the truncation.
    """
    u = 0.5 * cfg.coupling
    phi = pcs_state(p, t, coupling=cfg.coupling)
    tp, tm = branch_weights(cfg)
    lam = math.sqrt(lambda_sq(p, cfg, ctl))
    c = tp * displace_mode(phi, "a", u).coeffs
    if u != 0.0:
        c = c + tm * displace_mode(phi, "a", -u).coeffs
    else:
        c = c + tm * phi.coeffs
    c *= 0.5 * lam
    nrm = float(np.vdot(c, c).real)
    if abs(nrm - 1.0) > _NORM_TOL:
        raise TruncationError(f"output state has squared norm {nrm!r} instead of 1")
    return TwoModeState(c, normalized=True)


def success_probability(
    p: PcsParams, cfg: MeasurementConfig, ctl: SeriesControl = DEFAULT_CONTROL
) -> float:
    """Probability that the postselection onto ``|H>`` succeeds."""
    a2 = abs(weak_value(cfg)) ** 2
    pp = capital_p(p, cfg.coupling, ctl)
    val = 0.5 * math.cos(0.5 * cfg.alpha) ** 2 * (1.0 + a2 + (1.0 - a2) * pp)
    # rounding can push the value a hair outside [0, 1]
    return min(max(val, 0.0), 1.0)


def approx_weak_coupling(
    p: PcsParams, cfg: MeasurementConfig, t: TruncationSpec = TruncationSpec()
) -> TwoModeState:
    """First-order expansion in the coupling: ``[1 + (G/2) A (a^dag - a)] phi``, normalised."""
    phi = pcs_state(p, t, coupling=cfg.coupling)
    if cfg.coupling == 0.0:
        return phi
    a = weak_value(cfg)
    up = apply_ladder(phi, "a", "raise").coeffs
    down = apply_ladder(phi, "a", "lower").coeffs
    c = phi.coeffs + 0.5 * cfg.coupling * a * (up - down)
    return TwoModeState(c).normalize()


def approx_strong_small_gamma(
    p: PcsParams, cfg: MeasurementConfig, t: TruncationSpec = TruncationSpec()
) -> TwoModeState:
    """Output state with the PCS cut after its first two terms.

    ``phi ~ |delta>|0> + gamma/sqrt(1+delta) |delta+1>|1>``, each term pushed
    through the two displaced branches and the result normalised.
    """
    u = 0.5 * cfg.coupling
    margin = default_margin(cfg.coupling) if t.margin is None else t.margin
    na = p.delta + 2 + margin
    c = fock_state(p.delta, 0, na, 2).coeffs + p.gamma / math.sqrt(1.0 + p.delta) * fock_state(
        p.delta + 1, 1, na, 2
    ).coeffs
    ket = TwoModeState(c)
    tp, tm = branch_weights(cfg)
    out = tp * displace_mode(ket, "a", u).coeffs + tm * displace_mode(ket, "a", -u).coeffs
    return TwoModeState(out).normalize()
