import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm
from scipy.special import eval_genlaguerre, iv

from pcslab.specfun import (
    ConvergenceError,
    SeriesControl,
    bessel_i,
    displacement_element,
    displacement_matrix,
    laguerre_assoc,
    laguerre_table,
    log_factorial,
)


def test_bessel_known_values():
    assert bessel_i(0, 0.0) == 1.0
    assert bessel_i(3, 0.0) == 0.0
    assert bessel_i(0, 2.0) == pytest.approx(2.2795853023360673, rel=1e-14)
    assert bessel_i(1, 2.0) == pytest.approx(1.5906368546373291, rel=1e-14)


def test_bessel_negative_order_symmetry():
    for n in range(5):
        assert bessel_i(-n, 3.7) == bessel_i(n, 3.7)


def test_bessel_rejects_bad_arguments():
    with pytest.raises(ValueError):
        bessel_i(0, -1.0)
    with pytest.raises(ValueError):
        bessel_i(0, math.inf)
    with pytest.raises(ValueError):
        bessel_i(1.5, 1.0)


def test_bessel_convergence_error_when_capped():
    with pytest.raises(ConvergenceError):
        bessel_i(0, 200.0, SeriesControl(max_terms=20))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 12), st.floats(1e-3, 120.0))
def test_bessel_matches_scipy(n, x):
    assert bessel_i(n, x) == pytest.approx(iv(n, x), rel=1e-12)


def test_series_control_validation():
    with pytest.raises(ValueError):
        SeriesControl(rel_tol=0.0)
    with pytest.raises(ValueError):
        SeriesControl(max_terms=0)


def test_log_factorial_exact_and_large():
    assert log_factorial(0) == 0.0
    assert log_factorial(20) == math.log(math.factorial(20))
    assert log_factorial(100) == pytest.approx(float(mpmath.log(mpmath.factorial(100))), rel=1e-15)
    with pytest.raises(ValueError):
        log_factorial(-1)


def test_laguerre_low_degree_closed_forms():
    x = 0.7
    assert laguerre_assoc(0, 3, x) == 1.0
    assert laguerre_assoc(1, 0, x) == pytest.approx(1 - x)
    assert laguerre_assoc(2, 1, x) == pytest.approx(0.5 * (x * x - 6 * x + 6))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 60), st.integers(0, 20), st.floats(0.0, 40.0))
def test_laguerre_matches_mpmath(n, d, x):
    ref = float(mpmath.laguerre(n, d, x))
    scale = max(1.0, abs(ref), float(mpmath.binomial(n + d, n)))
    assert abs(laguerre_assoc(n, d, x) - ref) <= 1e-11 * scale


def test_laguerre_table_matches_scipy():
    x = np.array([0.0, 0.3, 2.5, 9.0])
    tab = laguerre_table(25, 3, x)
    for k in range(26):
        np.testing.assert_allclose(tab[:, k], eval_genlaguerre(k, 3, x), rtol=1e-10, atol=1e-10)


def _dense_displacement(amp, dim):
    a = np.diag(np.sqrt(np.arange(1, dim)), 1)
    return expm(amp * a.T - np.conj(amp) * a)


@pytest.mark.parametrize("amp", [0.3, 1.5 + 0.7j, -2.2j, 3.0])
def test_displacement_matrix_matches_expm(amp):
    # the dense exponential is only exact well below its truncation edge
    big = _dense_displacement(amp, 160)
    d = displacement_matrix(amp, 40)
    np.testing.assert_allclose(d, big[:40, :40], atol=1e-12)


def test_displacement_element_agrees_with_matrix():
    amp = 0.8 - 1.1j
    d = displacement_matrix(amp, 12, 9)
    for m in range(12):
        for n in range(9):
            assert displacement_element(m, n, amp) == pytest.approx(d[m, n], abs=1e-13)


def test_displacement_zero_is_identity():
    np.testing.assert_array_equal(displacement_matrix(0, 4, 3), np.eye(4, 3))
    assert displacement_element(2, 2, 0) == 1.0


def test_displacement_unitary_columns():
    amp = 1.3 + 0.4j
    d = displacement_matrix(amp, 120, 20)
    np.testing.assert_allclose(d.conj().T @ d, np.eye(20), atol=1e-12)


def test_displacement_rejects_non_finite():
    with pytest.raises(ValueError):
        displacement_matrix(complex(math.nan, 0), 3)
    with pytest.raises(ValueError):
        displacement_element(0, 0, math.inf)
