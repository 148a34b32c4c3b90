"""Moments of the measured state and the nonclassicality witnesses built on them.

Moments come in two flavours with the same interface: series closed forms
(:func:`closed_form_moments`) and brute force on a Fock grid
(:func:`oracle_moments`). Every witness takes a :class:`MomentSet`, so the
two can be swapped freely and compared.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from types import MappingProxyType

from .measurement import MeasurementConfig, branch_weights, lambda_sq
from .series import displaced_kernel, pcs_expectation
from .specfun import DEFAULT_CONTROL, SeriesControl
from .twomode import PcsParams, TwoModeState, moment

__all__ = [
    "MomentKind",
    "MomentSet",
    "IncompleteMomentSet",
    "closed_form_moment",
    "closed_form_moments",
    "oracle_moments",
    "quadrature_squeezing",
    "quadrature_variances",
    "sum_squeezing",
    "cross_correlation",
    "autocorrelation",
    "hz_correlation",
    "epr_correlation",
    "squeezing_db",
    "initial_quadrature_squeezing",
    "initial_cross_correlation",
    "initial_hz_correlation",
    "initial_epr_correlation",
]

_HERMITIAN_TOL = 1e-10


class MomentKind(enum.Enum):
    """Normally ordered moments ``<a^dag^p a^q b^dag^r b^t>``, valued ``(p, q, r, t)``."""

    AdagA = (1, 1, 0, 0)
    BdagB = (0, 0, 1, 1)
    AB = (0, 1, 0, 1)
    A2B2 = (0, 2, 0, 2)
    AdagABdagB = (1, 1, 1, 1)
    AdagB = (1, 0, 0, 1)
    A2 = (0, 2, 0, 0)
    B2 = (0, 0, 0, 2)
    A = (0, 1, 0, 0)
    B = (0, 0, 0, 1)
    Adag2A2 = (2, 2, 0, 0)
    Bdag2B2 = (0, 0, 2, 2)

    @property
    def hermitian(self) -> bool:
        p, q, r, t = self.value
        return p == q and r == t


class IncompleteMomentSet(KeyError):
    """A witness asked for a moment the set does not contain."""


@dataclass(frozen=True)
class MomentSet:
    """Moments keyed by :class:`MomentKind`, tagged with where they came from."""

    values: MappingProxyType = field()
    provenance: str = "closed_form"

    def __init__(self, values, provenance: str = "closed_form"):
        if provenance not in ("closed_form", "oracle"):
            raise ValueError(f"provenance must be 'closed_form' or 'oracle', got {provenance!r}")
        clean = {}
        for kind, v in values.items():
            kind = MomentKind[kind] if isinstance(kind, str) else MomentKind(kind)
            v = complex(v)
            if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                raise ValueError(f"moment {kind.name} is not finite: {v!r}")
            if kind.hermitian:
                if abs(v.imag) > _HERMITIAN_TOL * max(1.0, abs(v.real)):
                    raise ValueError(f"moment {kind.name} should be real, got {v!r}")
                v = complex(v.real, 0.0)
            clean[kind] = v
        object.__setattr__(self, "values", MappingProxyType(clean))
        object.__setattr__(self, "provenance", provenance)

    def __getitem__(self, kind: MomentKind) -> complex:
        try:
            return self.values[kind]
        except KeyError:
            raise IncompleteMomentSet(f"moment {kind.name} missing from {self.provenance} set") from None

    def __contains__(self, kind) -> bool:
        return kind in self.values

    def max_abs_deviation(self, other: "MomentSet") -> float:
        """Largest ``|self[k] - other[k]|`` over the kinds both sets contain."""
        common = set(self.values) & set(other.values)
        return max((abs(self.values[k] - other.values[k]) for k in common), default=0.0)


# -- closed forms --------------------------------------------------------------


def closed_form_moment(
    kind: MomentKind, p: PcsParams, cfg: MeasurementConfig, ctl: SeriesControl = DEFAULT_CONTROL
) -> complex:
    r"""Moment of the measured state as a PCS series.

    With ``u = G/2`` and branch weights ``t_+ = 1 + A``, ``t_- = 1 - A``::

        <O> = (lambda^2/4) sum_{s,s'} conj(t_s) t_s' <phi| D(-s u) O D(s' u) |phi>

    Moving the displacement through shifts ``a -> a + s u``; the binomial
    expansion leaves terms ``<phi| a^dag^i a^k b^dag^r b^t D((s'-s) u) |phi>``.
    Same-branch terms (``s = s'``) are Bessel ratios, cross terms are single
    Laguerre sums.
    """
    if not isinstance(kind, MomentKind):
        raise ValueError(f"unknown moment kind {kind!r}")
    pa, qa, rb, tb = kind.value
    u = 0.5 * cfg.coupling
    tp, tm = branch_weights(cfg)
    weights = {1: tp, -1: tm}
    total = 0j
    for s in (1, -1):
        for s2 in (1, -1):
            w = weights[s].conjugate() * weights[s2]
            if w == 0:
                continue
            total += w * _shifted_kernel(p, pa, qa, rb, tb, s * u, (s2 - s) * u, ctl)
    return 0.25 * lambda_sq(p, cfg, ctl) * total


def _shifted_kernel(p, pa, qa, rb, tb, shift, x, ctl) -> complex:
    """``<phi| (a^dag + shift)^pa (a + shift)^qa b^dag^rb b^tb D_a(x) |phi>``."""
    out = 0j
    for i in range(pa + 1):
        for k in range(qa + 1):
            coef = math.comb(pa, i) * math.comb(qa, k) * shift ** (pa - i + qa - k)
            if coef == 0:
                continue
            if x == 0.0:
                out += coef * pcs_expectation(p, i, k, rb, tb)
            else:
                out += coef * displaced_kernel(p, i, k, rb, tb, x, ctl)
    return out


def closed_form_moments(
    p: PcsParams, cfg: MeasurementConfig, ctl: SeriesControl = DEFAULT_CONTROL
) -> MomentSet:
    """All twelve moments from the series closed forms."""
    return MomentSet({k: closed_form_moment(k, p, cfg, ctl) for k in MomentKind}, "closed_form")


def oracle_moments(s: TwoModeState) -> MomentSet:
    """All twelve moments by brute force on the Fock grid."""
    return MomentSet({k: moment(s, *k.value) for k in MomentKind}, "oracle")


# -- witnesses ----------------------------------------------------------------


def quadrature_variances(m: MomentSet) -> tuple[float, float]:
    r"""Variances of the two-mode quadratures at phase zero.

    ``F1 = [(a + b) + (a^dag + b^dag)] / 2^(3/2)`` and
    ``F2 = [(a + b) - (a^dag + b^dag)] / (2^(3/2) i)``, so that
    ``[F1, F2] = i/2`` and the vacuum gives ``1/4`` for both.
    """
    na = m[MomentKind.AdagA].real
    nb = m[MomentKind.BdagB].real
    a2, b2, ab = m[MomentKind.A2], m[MomentKind.B2], m[MomentKind.AB]
    adb = m[MomentKind.AdagB]
    a, b = m[MomentKind.A], m[MomentKind.B]
    base = 0.25 * (1.0 + na + nb)
    v1 = base + 0.25 * (a2.real + b2.real) + 0.5 * (ab.real + adb.real) - 0.5 * (a.real + b.real) ** 2
    v2 = base - 0.25 * (a2.real + b2.real) - 0.5 * (ab.real - adb.real) - 0.5 * (a.imag + b.imag) ** 2
    return v1, v2


def quadrature_squeezing(m: MomentSet, which: int) -> float:
    """``Q_i = Var(F_i) - 1/4``; negative values mean squeezing, floor ``-1/4``."""
    if which not in (1, 2):
        raise ValueError(f"which must be 1 or 2, got {which!r}")
    return quadrature_variances(m)[which - 1] - 0.25


def sum_squeezing(m: MomentSet, varpi: float = 0.0) -> float:
    """Normalised sum-squeezing degree; below zero means sum squeezing, floor ``-1``."""
    na = m[MomentKind.AdagA].real
    nb = m[MomentKind.BdagB].real
    rot = complex(math.cos(varpi), -math.sin(varpi))
    num = (
        (rot * rot * m[MomentKind.A2B2]).real
        - 2.0 * (rot * m[MomentKind.AB]).real ** 2
        + m[MomentKind.AdagABdagB].real
    )
    return 2.0 * num / (na + nb + 1.0)


def _require_positive(value: float, what: str) -> float:
    if not value > 0.0:
        raise ValueError(f"{what} must be positive, got {value!r}")
    return value


def cross_correlation(m: MomentSet) -> float:
    """``<a^dag a b^dag b> / (<a^dag a><b^dag b>)``."""
    na = _require_positive(m[MomentKind.AdagA].real, "mean photon number of mode a")
    nb = _require_positive(m[MomentKind.BdagB].real, "mean photon number of mode b")
    return m[MomentKind.AdagABdagB].real / (na * nb)


def autocorrelation(m: MomentSet, mode: str) -> float:
    """Zero-delay ``g2`` of one mode; below one means sub-Poissonian."""
    if mode == "a":
        num, den = MomentKind.Adag2A2, MomentKind.AdagA
    elif mode == "b":
        num, den = MomentKind.Bdag2B2, MomentKind.BdagB
    else:
        raise ValueError(f"mode must be 'a' or 'b', got {mode!r}")
    n = _require_positive(m[den].real, f"mean photon number of mode {mode}")
    return m[num].real / (n * n)


def hz_correlation(m: MomentSet) -> float:
    """``<N_a><N_b> - |<ab>|^2``; negative values witness entanglement."""
    return m[MomentKind.AdagA].real * m[MomentKind.BdagB].real - abs(m[MomentKind.AB]) ** 2


def epr_correlation(m: MomentSet) -> float:
    """Total variance of ``x_a + x_b`` and ``p_a - p_b``; below two witnesses inseparability."""
    na = m[MomentKind.AdagA].real
    nb = m[MomentKind.BdagB].real
    ab = m[MomentKind.AB].real
    shift = m[MomentKind.A] - m[MomentKind.B].conjugate()
    return 2.0 * (1.0 + na + nb - 2.0 * ab) - 2.0 * abs(shift) ** 2


def squeezing_db(q: float) -> float:
    """Noise reduction below shot noise in decibels, from ``Q = Var - 1/4``."""
    q = float(q)
    if not q > -0.25:
        raise ValueError(f"q must exceed -1/4, got {q!r}")
    return -10.0 * math.log10((q + 0.25) / 0.25)


# -- initial state (no measurement) --------------------------------------------


def _initial_parts(p: PcsParams) -> tuple[float, float, complex]:
    na = pcs_expectation(p, 1, 1, 0, 0).real
    nb = pcs_expectation(p, 0, 0, 1, 1).real
    ab = pcs_expectation(p, 0, 1, 0, 1)
    return na, nb, ab


def initial_quadrature_squeezing(p: PcsParams, which: int) -> float:
    """``Q_i`` of the bare PCS: ``(N_a + N_b)/4 +- Re(gamma)/2``."""
    if which not in (1, 2):
        raise ValueError(f"which must be 1 or 2, got {which!r}")
    na, nb, ab = _initial_parts(p)
    sign = 1.0 if which == 1 else -1.0
    return 0.25 * (na + nb) + sign * 0.5 * ab.real


def initial_cross_correlation(p: PcsParams) -> float:
    """``g_ab`` of the bare PCS: ``I_delta(2g)^2 / (I_{delta-1}(2g) I_{delta+1}(2g))``."""
    na, nb, _ = _initial_parts(p)
    nanb = pcs_expectation(p, 1, 1, 1, 1).real
    return nanb / (_require_positive(na, "mean photon number of mode a") * _require_positive(nb, "mean photon number of mode b"))


def initial_hz_correlation(p: PcsParams) -> float:
    """``E`` of the bare PCS, equal to ``|gamma|^2 (1/g_ab - 1)``."""
    na, nb, ab = _initial_parts(p)
    return na * nb - abs(ab) ** 2


def initial_epr_correlation(p: PcsParams) -> float:
    """``I`` of the bare PCS, equal to ``8 Q_2 + 2``."""
    return 8.0 * initial_quadrature_squeezing(p, 2) + 2.0
