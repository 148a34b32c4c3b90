"""Scaled joint Wigner function of a two-mode state.

``P_J(alpha, beta)`` is the joint photon-number parity of the state after
displacing mode a by ``-alpha`` and mode b by ``-beta``; it is the Wigner
function without its ``4/pi^2`` prefactor and lies in [-1, 1].
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .specfun import displacement_matrix
from .twomode import (
    TruncationError,
    TwoModeState,
    _parity_signs,
    displace_mode,
    headroom_needed,
    joint_parity_expectation,
)

__all__ = [
    "Axis",
    "PhaseGrid",
    "WignerCut",
    "scaled_joint_wigner",
    "wigner_cut_2d",
    "wigner_cut_diag",
    "PLANES",
]

PLANES = ("ReRe", "ImIm")
# slack allowed on |P_J| <= 1 and on norm conservation under displacement
_BOUND_TOL = 1e-9


@dataclass(frozen=True)
class Axis:
    """Evenly spaced samples ``min..max`` (both ends included)."""

    min: float
    max: float
    count: int

    def __post_init__(self):
        lo, hi = float(self.min), float(self.max)
        if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
            raise ValueError(f"axis needs finite min < max, got {self.min!r}, {self.max!r}")
        if int(self.count) != self.count or self.count < 2:
            raise ValueError(f"axis count must be an integer >= 2, got {self.count!r}")
        object.__setattr__(self, "min", lo)
        object.__setattr__(self, "max", hi)
        object.__setattr__(self, "count", int(self.count))

    def values(self) -> np.ndarray:
        return np.linspace(self.min, self.max, self.count)


@dataclass(frozen=True)
class PhaseGrid:
    """A 2-D cut of the 4-D phase space.

    ``ReRe`` samples ``alpha = x1``, ``beta = x2`` on the real axes;
    ``ImIm`` samples ``alpha = i x1``, ``beta = i x2``.
    """

    axis1: Axis
    axis2: Axis
    plane: str = "ReRe"

    def __post_init__(self):
        _check_plane(self.plane)


@dataclass(frozen=True)
class WignerCut:
    grid: PhaseGrid
    values: np.ndarray  # shape (axis1.count, axis2.count)


def _check_plane(plane: str) -> None:
    if plane not in PLANES:
        raise ValueError(f"plane must be one of {PLANES}, got {plane!r}")


def _to_amplitudes(x: np.ndarray, plane: str) -> np.ndarray:
    return x.astype(complex) if plane == "ReRe" else 1j * x


def _with_headroom(s: TwoModeState, reach_a: float, reach_b: float) -> TwoModeState:
    """Zero-pad the grid so displacements up to the given reach stay inside it."""
    na = s.highest_occupied("a") + 1 + headroom_needed(reach_a)
    nb = s.highest_occupied("b") + 1 + headroom_needed(reach_b)
    return s.padded(max(na, s.na_dim), max(nb, s.nb_dim))


def _check_value(value: float, where: str) -> float:
    if not abs(value) <= 1.0 + _BOUND_TOL:
        raise ValueError(f"scaled Wigner value {value!r} at {where} is outside [-1, 1]")
    return value


def scaled_joint_wigner(s: TwoModeState, alpha: complex, beta: complex) -> float:
    """Joint parity of ``D_a(-alpha) D_b(-beta) s``."""
    if not s.normalized:
        raise ValueError("scaled_joint_wigner needs a normalized state")
    shifted = displace_mode(displace_mode(s, "a", -complex(alpha)), "b", -complex(beta))
    return _check_value(joint_parity_expectation(shifted), f"({alpha}, {beta})")


def _parity_rows(c, da_stack, db_stack, sign, workers):
    """Parity for every pair ``(da_stack[i], db_stack[j])``, one row per ``i``.

    Each row is computed on its own with the same operations, so results do
    not depend on how rows are spread over workers.
    """

    def row(i):
        x = da_stack[i] @ c
        y = np.einsum("mn,jkn->jmk", x, db_stack)
        w = np.abs(y) ** 2
        return np.einsum("jmk,mk->j", w, sign), w.sum(axis=(1, 2))

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            rows = list(ex.map(row, range(len(da_stack))))
    else:
        rows = [row(i) for i in range(len(da_stack))]
    return np.array([r[0] for r in rows]), np.array([r[1] for r in rows])


def _finish(values, norms, s, what) -> np.ndarray:
    target = s.norm_sq()
    if np.max(np.abs(norms - target)) > _BOUND_TOL:
        raise TruncationError(f"{what}: displacement lost norm, grid headroom too small")
    values = values / target
    bad = np.abs(values) > 1.0 + _BOUND_TOL
    if np.any(bad):
        raise ValueError(f"{what}: scaled Wigner value outside [-1, 1]: {values[bad][0]!r}")
    return values


def wigner_cut_2d(s: TwoModeState, g: PhaseGrid, workers: int | None = None) -> WignerCut:
    """``P_J`` on a 2-D plane cut; rows follow ``axis1``, columns ``axis2``."""
    if not s.normalized:
        raise ValueError("wigner_cut_2d needs a normalized state")
    x1, x2 = g.axis1.values(), g.axis2.values()
    amp1, amp2 = _to_amplitudes(x1, g.plane), _to_amplitudes(x2, g.plane)
    s = _with_headroom(s, np.max(np.abs(x1)), np.max(np.abs(x2)))
    na, nb = s.shape
    da = np.stack([displacement_matrix(-a, na) for a in amp1])
    db = np.stack([displacement_matrix(-b, nb) for b in amp2])
    values, norms = _parity_rows(s.coeffs, da, db, _parity_signs(na, nb), workers)
    return WignerCut(g, _finish(values, norms, s, f"{g.plane} cut"))


def wigner_cut_diag(s: TwoModeState, plane: str, axis: Axis) -> tuple[np.ndarray, np.ndarray]:
    """``(t, P_J)`` along ``alpha = beta = t`` (ReRe) or ``alpha = beta = i t`` (ImIm)."""
    _check_plane(plane)
    if not s.normalized:
        raise ValueError("wigner_cut_diag needs a normalized state")
    t = axis.values()
    amps = _to_amplitudes(t, plane)
    reach = float(np.max(np.abs(t)))
    s = _with_headroom(s, reach, reach)
    na, nb = s.shape
    sign = _parity_signs(na, nb)
    values = np.empty(t.size)
    norms = np.empty(t.size)
    for i, z in enumerate(amps):
        y = displacement_matrix(-z, na) @ s.coeffs @ displacement_matrix(-z, nb).T
        w = np.abs(y) ** 2
        values[i] = np.sum(w * sign)
        norms[i] = w.sum()
    return t, _finish(values, norms, s, f"{plane} diagonal")
