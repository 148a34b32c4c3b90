"""Special functions used throughout the package.

Modified Bessel functions of integer order, associated Laguerre polynomials,
log-factorials and matrix elements of the single-mode displacement operator.
Everything here is a pure function of its arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ConvergenceError",
    "SeriesControl",
    "DEFAULT_CONTROL",
    "bessel_i",
    "laguerre_assoc",
    "laguerre_table",
    "log_factorial",
    "log_factorial_array",
    "displacement_element",
    "displacement_matrix",
]

# exact integer factorial is used up to this argument
_EXACT_FACTORIAL_MAX = 20
# finite-sum Laguerre evaluation is only attempted up to this degree
_LAGUERRE_SUM_MAX_DEGREE = 30
# fall back to the recurrence if the finite sum cancels more than this
_LAGUERRE_CANCELLATION_LIMIT = 1e3


def _as_int(value, name: str) -> int:
    if isinstance(value, (bool, np.bool_)) or int(value) != value:
        raise ValueError(f"{name} must be an integer, got {value!r}")
    return int(value)


def _as_index(value, name: str) -> int:
    value = _as_int(value, name)
    if value < 0:
        raise ValueError(f"{name} must be non-negative, got {value}")
    return value


class ConvergenceError(RuntimeError):
    """A series did not reach its tolerance within the allowed number of terms."""


@dataclass(frozen=True)
class SeriesControl:
    """Truncation control for infinite series.

    Parameters
    ----------
    rel_tol : float
        A series stops once the newest term is below ``rel_tol`` times the
        partial sum (three times in a row).
    max_terms : int
        Hard cap on the number of terms.
    """

    rel_tol: float = 1e-14
    max_terms: int = 10_000

    def __post_init__(self):
        if not (self.rel_tol > 0 and math.isfinite(self.rel_tol)):
            raise ValueError(f"rel_tol must be positive, got {self.rel_tol!r}")
        if int(self.max_terms) != self.max_terms or self.max_terms < 1:
            raise ValueError(f"max_terms must be a positive integer, got {self.max_terms!r}")


DEFAULT_CONTROL = SeriesControl()


def log_factorial(n: int) -> float:
    """ln(n!); exact via integer factorial for n <= 20."""
    n = _as_index(n, "n")
    if n <= _EXACT_FACTORIAL_MAX:
        return math.log(math.factorial(n))
    return math.lgamma(n + 1.0)


_LOG_FACT_CACHE = np.array([log_factorial(k) for k in range(_EXACT_FACTORIAL_MAX + 1)])


def log_factorial_array(n) -> np.ndarray:
    """Vectorised :func:`log_factorial`. Negative entries map to ``+inf``.

    ``+inf`` is convenient because ``1/(-k)!`` is then ``exp(-inf) == 0``,
    which is exactly the convention used for vanishing series terms.
    """
    n = np.asarray(n)
    out = np.full(n.shape, np.inf)
    ok = n >= 0
    small = ok & (n <= _EXACT_FACTORIAL_MAX)
    out[small] = _LOG_FACT_CACHE[n[small].astype(int)]
    big = ok & ~small
    if np.any(big):
        from scipy.special import gammaln

        out[big] = gammaln(n[big] + 1.0)
    return out


def bessel_i(order: int, x: float, ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    r"""Modified Bessel function of the first kind :math:`I_n(x)` for integer n.

    Evaluated from its power series, summing until the newest term drops
    below ``ctl.rel_tol`` of the partial sum three times in a row. Negative
    orders use :math:`I_{-n} = I_n`.
    """
    order = abs(_as_int(order, "order"))
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"bessel_i needs a finite argument, got {x!r}")
    if x < 0:
        raise ValueError(f"bessel_i is defined here for x >= 0, got {x!r}")
    if x == 0.0:
        return 1.0 if order == 0 else 0.0

    half = 0.5 * x
    q = half * half
    term = math.exp(order * math.log(half) - log_factorial(order))
    total = term
    small_run = 0
    for n in range(1, ctl.max_terms):
        term *= q / (n * (n + order))
        total += term
        # terms rise until n ~ x/2, so only count small terms after the peak
        if term < ctl.rel_tol * total and n > half:
            small_run += 1
            if small_run == 3:
                return total
        else:
            small_run = 0
    raise ConvergenceError(
        f"I_{order}({x}) not converged within {ctl.max_terms} terms"
    )


def laguerre_assoc(n: int, d: int, x: float) -> float:
    r"""Associated Laguerre polynomial :math:`L_n^{(d)}(x)`.

    Uses the explicit finite sum
    :math:`\sum_{m=0}^{n} (-1)^m \binom{n+d}{m+d} x^m/m!` for low degree
    and the three-term recurrence otherwise, or whenever the alternating
    sum would lose more than three digits to cancellation.
    """
    n = _as_index(n, "n")
    d = _as_index(d, "d")
    x = float(x)
    if n == 0:
        return 1.0
    if n <= _LAGUERRE_SUM_MAX_DEGREE:
        value, magnitude = _laguerre_sum(n, d, x)
        if magnitude <= _LAGUERRE_CANCELLATION_LIMIT * abs(value):
            return value
    return float(laguerre_table(n, d, x)[-1])


def _laguerre_sum(n: int, d: int, x: float) -> tuple[float, float]:
    total = 0.0
    magnitude = 0.0
    term = float(math.comb(n + d, d))  # m = 0
    for m in range(n + 1):
        if m > 0:
            # C(n+d, m+d)/C(n+d, m+d-1) = (n-m+1)/(m+d); times -x/m
            term *= -x * (n - m + 1) / ((m + d) * m)
        total += term
        magnitude += abs(term)
    return total, magnitude


def laguerre_table(kmax: int, d: int, x) -> np.ndarray:
    r"""All :math:`L_k^{(d)}(x)` for ``k = 0..kmax`` by forward recurrence.

    ``x`` may be a scalar or an array; the degree axis is the last one.
    """
    kmax = _as_index(kmax, "kmax")
    d = _as_index(d, "d")
    x = np.asarray(x, dtype=float)
    out = np.empty(x.shape + (kmax + 1,))
    out[..., 0] = 1.0
    if kmax >= 1:
        out[..., 1] = 1.0 + d - x
    for k in range(1, kmax):
        out[..., k + 1] = ((2 * k + 1 + d - x) * out[..., k] - (k + d) * out[..., k - 1]) / (k + 1)
    return out


def displacement_element(m: int, n: int, amp: complex) -> complex:
    r"""Fock matrix element :math:`\langle m|D(\beta)|n\rangle`.

    Laguerre form, valid for both orderings of the indices::

        <n+d|D(b)|n> = sqrt(n!/(n+d)!) exp(-|b|^2/2) b^d       L_n^(d)(|b|^2)
        <n|D(b)|n+d> = sqrt(n!/(n+d)!) exp(-|b|^2/2) (-b*)^d   L_n^(d)(|b|^2)
    """
    m = _as_index(m, "m")
    n = _as_index(n, "n")
    amp = complex(amp)
    if not (math.isfinite(amp.real) and math.isfinite(amp.imag)):
        raise ValueError(f"displacement amplitude must be finite, got {amp!r}")
    if amp == 0:
        return 1.0 + 0j if m == n else 0j
    lo, hi = min(m, n), max(m, n)
    d = hi - lo
    r2 = abs(amp) ** 2
    base = amp if m >= n else -amp.conjugate()
    scale = math.exp(0.5 * (log_factorial(lo) - log_factorial(hi)) - 0.5 * r2)
    return scale * base**d * laguerre_assoc(lo, d, r2)


def displacement_matrix(amp: complex, rows: int, cols: int | None = None) -> np.ndarray:
    r"""Block ``[:rows, :cols]`` of the displacement operator :math:`D(\beta)`.

    Same Laguerre form as :func:`displacement_element`, vectorised over all
    offsets ``d = |m - n|`` at once. The entries are matrix elements of the
    infinite operator, not of a truncated exponential.
    """
    rows = _as_index(rows, "rows")
    cols = rows if cols is None else _as_index(cols, "cols")
    amp = complex(amp)
    if not (math.isfinite(amp.real) and math.isfinite(amp.imag)):
        raise ValueError(f"displacement amplitude must be finite, got {amp!r}")
    out = np.zeros((rows, cols), dtype=complex)
    if rows == 0 or cols == 0:
        return out
    if amp == 0:
        k = min(rows, cols)
        out[np.arange(k), np.arange(k)] = 1.0
        return out

    r2 = abs(amp) ** 2
    m = np.arange(rows)[:, None]
    n = np.arange(cols)[None, :]
    lo = np.minimum(m, n)
    d = np.abs(m - n)
    dmax = max(rows, cols) - 1
    kmax = min(rows, cols) - 1
    lag = _laguerre_offsets(kmax, dmax, r2)
    lf = log_factorial_array(np.arange(max(rows, cols)))
    log_mag = 0.5 * (lf[lo] - lf[lo + d]) - 0.5 * r2 + d * math.log(abs(amp))
    phase = np.where(m >= n, np.exp(1j * d * np.angle(amp)), np.exp(1j * d * np.angle(-amp.conjugate())))
    return np.exp(log_mag) * phase * lag[d, lo]


def _laguerre_offsets(kmax: int, dmax: int, x: float) -> np.ndarray:
    """``L_k^(d)(x)`` for every ``d <= dmax`` (rows) and ``k <= kmax`` (columns)."""
    d = np.arange(dmax + 1, dtype=float)
    out = np.empty((dmax + 1, kmax + 1))
    out[:, 0] = 1.0
    if kmax >= 1:
        out[:, 1] = 1.0 + d - x
    for k in range(1, kmax):
        out[:, k + 1] = ((2 * k + 1 + d - x) * out[:, k] - (k + d) * out[:, k - 1]) / (k + 1)
    return out
