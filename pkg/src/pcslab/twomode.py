"""Truncated two-mode Fock space.

Pure states are stored as dense ``(na, nb)`` amplitude grids. The module
builds pair coherent states, applies ladder and displacement operators
directly to grids, and evaluates normally ordered moments by brute force.
It is the reference every series formula in the package is checked against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .specfun import bessel_i, displacement_matrix, log_factorial_array

__all__ = [
    "TruncationError",
    "PcsParams",
    "TruncationSpec",
    "TwoModeState",
    "MAX_DIM",
    "default_margin",
    "pcs_log_amplitudes",
    "pcs_state",
    "vacuum",
    "fock_state",
    "coherent_state",
    "from_coeffs",
    "apply_ladder",
    "displace_mode",
    "headroom_needed",
    "inner",
    "moment",
    "joint_parity_expectation",
]

MAX_DIM = 4096
# marginal probability above which a Fock level counts as occupied
OCCUPANCY_EPS = 1e-14
_NORM_TOL = 1e-9


class TruncationError(RuntimeError):
    """Probability mass reached the edge of the Fock grid."""


@dataclass(frozen=True)
class PcsParams:
    """Pair coherent state parameters: complex amplitude ``gamma`` and the
    photon-number difference ``delta`` between modes a and b."""

    gamma: complex
    delta: int = 0

    def __post_init__(self):
        g = complex(self.gamma)
        if not (math.isfinite(g.real) and math.isfinite(g.imag)):
            raise ValueError(f"gamma must be finite, got {self.gamma!r}")
        if isinstance(self.delta, bool) or int(self.delta) != self.delta or self.delta < 0:
            raise ValueError(f"delta must be a non-negative integer, got {self.delta!r}")
        object.__setattr__(self, "gamma", g)
        object.__setattr__(self, "delta", int(self.delta))

    @property
    def norm_sq(self) -> float:
        """Squared normalisation ``1 / I_delta(2|gamma|)``; ``inf`` for gamma = 0, delta > 0."""
        ival = bessel_i(self.delta, 2.0 * abs(self.gamma))
        return math.inf if ival == 0.0 else 1.0 / ival


@dataclass(frozen=True)
class TruncationSpec:
    """How much of the Fock ladder to keep.

    ``tail_prob`` bounds the norm of the discarded PCS amplitudes (so the
    discarded probability is below its square);
    ``margin`` adds empty levels above the occupied ones (``None`` picks
    :func:`default_margin` for the operations that follow).
    """

    tail_prob: float = 1e-12
    margin: int | None = None

    def __post_init__(self):
        if not (0.0 < self.tail_prob < 1e-6):
            raise ValueError(f"tail_prob must lie in (0, 1e-6), got {self.tail_prob!r}")
        if self.margin is not None and (int(self.margin) != self.margin or self.margin < 0):
            raise ValueError(f"margin must be a non-negative integer, got {self.margin!r}")


def default_margin(coupling: float = 0.0, displacement: float = 0.0) -> int:
    """Headroom for displacements up to ``coupling`` (the measurement, or the
    ``D_a(G)`` overlap check) followed by an extra displacement of size
    ``displacement`` (e.g. a Wigner sample point)."""
    margin = headroom_needed(coupling)
    if displacement:
        margin += headroom_needed(displacement)
    return margin


class TwoModeState:
    """Amplitude grid ``coeffs[n_a, n_b]`` of a pure two-mode state.

    The array is copied and frozen on construction; operations return new
    states.
    """

    __slots__ = ("coeffs", "normalized")

    def __init__(self, coeffs, normalized: bool = False):
        c = np.array(coeffs, dtype=complex, copy=True)
        if c.ndim != 2 or c.shape[0] < 1 or c.shape[1] < 1:
            raise ValueError(f"coeffs must be a non-empty 2-D grid, got shape {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("coeffs contain non-finite entries")
        if normalized:
            nrm = float(np.vdot(c, c).real)
            if abs(nrm - 1.0) > _NORM_TOL:
                raise ValueError(f"state flagged normalized but has squared norm {nrm!r}")
        c.flags.writeable = False
        self.coeffs = c
        self.normalized = bool(normalized)

    @property
    def na_dim(self) -> int:
        return self.coeffs.shape[0]

    @property
    def nb_dim(self) -> int:
        return self.coeffs.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.coeffs.shape

    def norm_sq(self) -> float:
        return float(np.vdot(self.coeffs, self.coeffs).real)

    def normalize(self) -> "TwoModeState":
        nrm = self.norm_sq()
        if nrm == 0.0:
            raise ValueError("cannot normalise the zero state")
        return TwoModeState(self.coeffs / math.sqrt(nrm), normalized=True)

    def padded(self, na: int, nb: int) -> "TwoModeState":
        """Zero-pad to at least ``(na, nb)``."""
        na, nb = max(na, self.na_dim), max(nb, self.nb_dim)
        if (na, nb) == self.shape:
            return self
        c = np.zeros((na, nb), dtype=complex)
        c[: self.na_dim, : self.nb_dim] = self.coeffs
        return TwoModeState(c, self.normalized)

    def marginal(self, mode: str) -> np.ndarray:
        """Photon-number distribution of one mode (unnormalised)."""
        p = np.abs(self.coeffs) ** 2
        return p.sum(axis=1) if _mode_axis(mode) == 0 else p.sum(axis=0)

    def highest_occupied(self, mode: str, eps: float = OCCUPANCY_EPS) -> int:
        """Largest Fock level of ``mode`` whose probability exceeds ``eps``
        (relative to the total); -1 for the zero state."""
        p = self.marginal(mode)
        total = p.sum()
        if total == 0.0:
            return -1
        idx = np.nonzero(p > eps * total)[0]
        return int(idx[-1]) if idx.size else -1

    def __repr__(self):
        return f"TwoModeState(shape={self.shape}, normalized={self.normalized})"


def pcs_log_amplitudes(p: PcsParams, nmax: int) -> tuple[np.ndarray, np.ndarray]:
    """``log|c_n|`` and ``arg c_n`` for the PCS expansion coefficients
    ``c_n = N gamma^(n + delta/2) / sqrt(n! (n+delta)!)``, ``n = 0..nmax``.

    For ``gamma = 0`` the state is the limit ``|delta>_a |0>_b``.
    """
    n = np.arange(nmax + 1)
    g = abs(p.gamma)
    if g == 0.0:
        logc = np.full(n.shape, -np.inf)
        logc[0] = 0.0
        return logc, np.zeros(n.shape)
    log_norm = -0.5 * math.log(bessel_i(p.delta, 2.0 * g))
    logc = (
        (n + 0.5 * p.delta) * math.log(g)
        - 0.5 * (log_factorial_array(n) + log_factorial_array(n + p.delta))
        + log_norm
    )
    return logc, (n + 0.5 * p.delta) * np.angle(p.gamma)


def _pcs_cutoff(p: PcsParams, tail_prob: float) -> int:
    """Smallest n_max whose discarded amplitudes have norm below ``tail_prob``.

    Bounding the amplitude norm rather than the probability matters because
    off-diagonal moments such as ``<ab>`` are linear in the amplitudes; the
    discarded probability is then below ``tail_prob**2``.
    """
    g = abs(p.gamma)
    if g == 0.0:
        return 0
    limit = tail_prob * tail_prob
    guess = int(g + 12.0 * math.sqrt(g + 1.0) + 30)
    while True:
        if guess + p.delta >= MAX_DIM:
            raise TruncationError(
                f"PCS with |gamma|={g} needs more than {MAX_DIM} levels per mode"
            )
        logc, _ = pcs_log_amplitudes(p, guess)
        w = np.exp(2.0 * logc)
        # tail measured from the top so the tiny end of the sum is accurate
        tail = np.cumsum(w[::-1])[::-1]
        ok = np.nonzero(tail < limit)[0]
        if ok.size and ok[0] > 0 and w[-1] < 1e-6 * limit:
            return int(ok[0]) - 1
        guess *= 2


def pcs_state(
    p: PcsParams, t: TruncationSpec = TruncationSpec(), *, coupling: float = 0.0, displacement: float = 0.0
) -> TwoModeState:
    """Pair coherent state ``|gamma, delta>`` on a grid sized for the
    operations that follow (``coupling`` and ``displacement`` set the default
    headroom when ``t.margin`` is ``None``)."""
    n_max = _pcs_cutoff(p, t.tail_prob)
    margin = default_margin(coupling, displacement) if t.margin is None else t.margin
    na, nb = n_max + p.delta + 1 + margin, n_max + 1 + margin
    if max(na, nb) > MAX_DIM:
        raise TruncationError(f"grid {na}x{nb} exceeds the {MAX_DIM}-level limit")
    logc, phase = pcs_log_amplitudes(p, n_max)
    c = np.zeros((na, nb), dtype=complex)
    n = np.arange(n_max + 1)
    c[n + p.delta, n] = np.exp(logc) * np.exp(1j * phase)
    return TwoModeState(c / math.sqrt(float(np.vdot(c, c).real)), normalized=True)


def vacuum(na: int = 1, nb: int = 1) -> TwoModeState:
    return fock_state(0, 0, na, nb)


def fock_state(n_a: int, n_b: int, na: int | None = None, nb: int | None = None) -> TwoModeState:
    """``|n_a>|n_b>`` on an ``(na, nb)`` grid (default: just large enough)."""
    na = n_a + 1 if na is None else na
    nb = n_b + 1 if nb is None else nb
    c = np.zeros((na, nb), dtype=complex)
    c[n_a, n_b] = 1.0
    return TwoModeState(c, normalized=True)


def coherent_state(amp_a: complex, amp_b: complex, na: int, nb: int) -> TwoModeState:
    """Product of coherent states, built from the textbook Poisson amplitudes."""

    def column(amp, dim):
        k = np.arange(dim)
        if amp == 0:
            v = np.zeros(dim, dtype=complex)
            v[0] = 1.0
            return v
        logmag = k * math.log(abs(amp)) - 0.5 * log_factorial_array(k) - 0.5 * abs(amp) ** 2
        return np.exp(logmag) * np.exp(1j * k * np.angle(amp))

    c = np.outer(column(complex(amp_a), na), column(complex(amp_b), nb))
    return TwoModeState(c).normalize()


def from_coeffs(coeffs) -> TwoModeState:
    return TwoModeState(coeffs)


def apply_ladder(s: TwoModeState, mode: str, kind: str, tol: float = 1e-12) -> TwoModeState:
    """Apply ``a``, ``a^dag``, ``b`` or ``b^dag`` to the grid.

    Raising keeps the grid size, so it refuses to act when the top level of
    the mode carries more than ``tol`` of the probability.
    """
    axis = _mode_axis(mode)
    c = s.coeffs if axis == 0 else s.coeffs.T
    dim = c.shape[0]
    sq = np.sqrt(np.arange(1, dim))[:, None]
    out = np.zeros_like(c)
    if kind == "lower":
        out[:-1] = sq * c[1:]
    elif kind == "raise":
        top = float(np.sum(np.abs(c[-1]) ** 2))
        total = s.norm_sq()
        if top > tol * max(total, 1e-300):
            raise TruncationError(
                f"raising mode {mode} would push {top:.3e} of the weight past level {dim - 1}"
            )
        out[1:] = sq * c[:-1]
    else:
        raise ValueError(f"kind must be 'raise' or 'lower', got {kind!r}")
    return TwoModeState(out if axis == 0 else out.T)


def displace_mode(s: TwoModeState, mode: str, amp: complex, check: bool = True) -> TwoModeState:
    """Apply ``D(amp)`` to one mode via its exact Fock matrix elements."""
    amp = complex(amp)
    if amp == 0:
        return s
    axis = _mode_axis(mode)
    dim = s.shape[axis]
    if check:
        need = headroom_needed(amp)
        top = s.highest_occupied(mode)
        if dim - 1 - top < need:
            raise TruncationError(
                f"displacing mode {mode} by |{abs(amp):.3g}| needs {need} free levels above "
                f"level {top}, grid has {dim - 1 - top}"
            )
    d = displacement_matrix(amp, dim)
    c = d @ s.coeffs if axis == 0 else s.coeffs @ d.T
    out = TwoModeState(c)
    if s.normalized:
        nrm = out.norm_sq()
        if abs(nrm - 1.0) > _NORM_TOL:
            raise TruncationError(f"displacement lost norm: {nrm!r}")
        out = TwoModeState(c, normalized=True)
    return out


def headroom_needed(amp: complex) -> int:
    r = abs(complex(amp))
    return math.ceil(r * r + 10.0 * r + 10.0)


def inner(s1: TwoModeState, s2: TwoModeState) -> complex:
    """``<s1|s2>``; grids of different size are zero-padded."""
    na = max(s1.na_dim, s2.na_dim)
    nb = max(s1.nb_dim, s2.nb_dim)
    return complex(np.vdot(s1.padded(na, nb).coeffs, s2.padded(na, nb).coeffs))


def moment(s: TwoModeState, p: int, q: int, r: int, t: int) -> complex:
    """Normally ordered moment ``<a^dag^p a^q b^dag^r b^t>``.

    Evaluated as ``<a^p b^r s | a^q b^t s>`` so only lowering operators are
    applied and nothing can run off the top of the grid.
    """
    for name, v in (("p", p), ("q", q), ("r", r), ("t", t)):
        if int(v) != v or v < 0:
            raise ValueError(f"{name} must be a non-negative integer, got {v!r}")
    left = _lower_many(s, p, r)
    right = _lower_many(s, q, t)
    return complex(np.vdot(left.coeffs, right.coeffs)) / s.norm_sq()


def _lower_many(s: TwoModeState, na: int, nb: int) -> TwoModeState:
    for _ in range(na):
        s = apply_ladder(s, "a", "lower")
    for _ in range(nb):
        s = apply_ladder(s, "b", "lower")
    return s


def joint_parity_expectation(s: TwoModeState) -> float:
    """``<(-1)^(n_a + n_b)>``."""
    sign = _parity_signs(*s.shape)
    return float(np.sum(sign * np.abs(s.coeffs) ** 2) / s.norm_sq())


def _parity_signs(na: int, nb: int) -> np.ndarray:
    return np.where((np.arange(na)[:, None] + np.arange(nb)[None, :]) % 2 == 0, 1.0, -1.0)


def _mode_axis(mode: str) -> int:
    if mode == "a":
        return 0
    if mode == "b":
        return 1
    raise ValueError(f"mode must be 'a' or 'b', got {mode!r}")
