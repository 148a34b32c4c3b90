"""Single-index series over the pair coherent state expansion.

Every closed-form result in the package reduces to sums of the form
``sum_n conj(c_n') c_n * (factorial ratios) * <j|D(x)|n+delta>`` with the
PCS coefficients ``c_n``. These helpers evaluate them directly from the
coefficients and the Laguerre form of the displacement matrix elements,
without ever building a Fock grid.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .specfun import (
    DEFAULT_CONTROL,
    ConvergenceError,
    SeriesControl,
    bessel_i,
    laguerre_table,
    log_factorial_array,
)
from .twomode import PcsParams, pcs_log_amplitudes

__all__ = ["series_cutoff", "pcs_expectation", "displaced_kernel", "overlap_displaced"]

# polynomial growth allowance for factorial-ratio prefactors in the kernels
_POLY_ORDER = 6


@lru_cache(maxsize=256)
def series_cutoff(p: PcsParams, ctl: SeriesControl = DEFAULT_CONTROL) -> int:
    """Number of PCS terms after which every kernel's tail is below
    ``ctl.rel_tol`` (three consecutive terms past the peak)."""
    g = abs(p.gamma)
    if g == 0.0:
        return 4
    guess = int(g + 12.0 * math.sqrt(g + 1.0) + 40)
    log_tol = math.log(ctl.rel_tol) - 5.0
    while True:
        top = min(guess, ctl.max_terms)
        logc, _ = pcs_log_amplitudes(p, top)
        n = np.arange(top + 1)
        size = 2.0 * logc + _POLY_ORDER * np.log(n + p.delta + 2.0)
        peak = int(np.argmax(size))
        small = size < log_tol
        small[: peak + 1] = False
        run = small[:-2] & small[1:-1] & small[2:]
        hits = np.nonzero(run)[0]
        if hits.size:
            return int(hits[0]) + 2
        if top >= ctl.max_terms:
            raise ConvergenceError(
                f"PCS series for |gamma|={g} not converged within {ctl.max_terms} terms"
            )
        guess *= 2


@lru_cache(maxsize=256)
def _log_amplitudes(p: PcsParams, n_max: int) -> np.ndarray:
    logc, _ = pcs_log_amplitudes(p, n_max)
    logc.flags.writeable = False
    return logc


@lru_cache(maxsize=64)
def _log_factorials(size: int) -> np.ndarray:
    out = log_factorial_array(np.arange(size))
    out.flags.writeable = False
    return out


@lru_cache(maxsize=1024)
def _laguerre_column(kmax: int, d: int, x: float) -> np.ndarray:
    out = laguerre_table(kmax, d, x)
    out.flags.writeable = False
    return out


@lru_cache(maxsize=1024)
def _bessel_ratio(p: PcsParams, shift: int) -> float:
    g2 = 2.0 * abs(p.gamma)
    return bessel_i(p.delta + shift, g2) / bessel_i(p.delta, g2)


def pcs_expectation(p: PcsParams, i: int, k: int, r: int, t: int) -> complex:
    r"""``<phi| a^dag^i a^k b^dag^r b^t |phi>`` for the undisplaced PCS.

    Nonzero only when ``i - k == r - t``; then equal to
    :math:`e^{-i(i-k)\arg\gamma} |\gamma|^{t+i} I_{\delta+t-k}(2|\gamma|)/I_\delta(2|\gamma|)`.
    """
    if i - k != r - t:
        return 0j
    g = abs(p.gamma)
    if g == 0.0:
        # limit state |delta>_a |0>_b
        if r or t or k > p.delta:
            return 0j
        return complex(math.exp(math.lgamma(p.delta + 1) - math.lgamma(p.delta - k + 1)))
    theta = (i - k) * np.angle(p.gamma)
    return g ** (t + i) * _bessel_ratio(p, t - k) * complex(math.cos(theta), -math.sin(theta))


def displaced_kernel(
    p: PcsParams, i: int, k: int, r: int, t: int, x: float, ctl: SeriesControl = DEFAULT_CONTROL
) -> complex:
    r"""``<phi| a^dag^i a^k b^dag^r b^t D_a(x) |phi>`` for real ``x``.

    One sum over the PCS index n, with n' = n + r - t and
    j = n' + delta + k - i::

        conj(c_n') c_n sqrt(n! n'!)/(n-t)! sqrt(j! (n'+delta)!)/(j-k)! <j|D(x)|n+delta>

    Terms with a negative factorial argument vanish and are skipped.
    """
    x = float(x)
    if x == 0.0:
        return pcs_expectation(p, i, k, r, t)
    n_max = series_cutoff(p, ctl)
    logc = _log_amplitudes(p, n_max)
    delta = p.delta
    n = np.arange(n_max + 1)
    n2 = n + r - t
    j = n2 + delta + k - i
    valid = (n >= t) & (n2 >= 0) & (n2 <= n_max) & (j - k >= 0) & (j >= 0)
    if not np.any(valid):
        return 0j
    n, n2, j = n[valid], n2[valid], j[valid]
    m = n + delta
    lo = np.minimum(j, m)
    dd = abs(r - t + k - i)
    lf = _log_factorials(n_max + delta + i + k + r + t + 2)
    log_mag = (
        logc[n2]
        + logc[n]
        + 0.5 * (lf[n] + lf[n2])
        - lf[n - t]
        + 0.5 * (lf[j] + lf[n2 + delta])
        - lf[j - k]
        + 0.5 * (lf[lo] - lf[lo + dd])
        - 0.5 * x * x
    )
    lag = _laguerre_column(int(lo.max()), dd, x * x)[lo]
    # j - m is the same for every term
    base = x if (j[0] - m[0]) >= 0 else -x
    total = float(np.sum(np.exp(log_mag) * lag)) * base**dd
    phase = (t - r) * np.angle(p.gamma)
    return total * complex(math.cos(phase), math.sin(phase))


def overlap_displaced(p: PcsParams, x: float, ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """``<phi|D_a(x)|phi>``: the PCS-averaged ``exp(-x^2/2) L_{n+delta}(x^2)``."""
    return displaced_kernel(p, 0, 0, 0, 0, x, ctl).real
