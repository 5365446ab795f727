from fractions import Fraction
from math import factorial

import numpy as np
import pytest
import sympy

from hypheat.asymptotics import (
    RationalSeries,
    bernoulli,
    diagonal_taylor,
    even_coincidence_series,
    extract_a_coeffs,
    k2_series,
    k4_series,
)
from hypheat.heatkernel import p2, p_even, p_odd
from hypheat.hypgeom import DimensionParams


def test_bernoulli_values():
    assert bernoulli(2) == Fraction(1, 6)
    assert bernoulli(4) == Fraction(-1, 30)
    assert bernoulli(12) == Fraction(-691, 2730)
    assert bernoulli(0) == 1


@pytest.mark.parametrize("idx", range(2, 80, 2))
def test_bernoulli_matches_sympy(idx):
    ref = sympy.bernoulli(idx)
    assert bernoulli(idx) == Fraction(int(ref.p), int(ref.q))


def test_bernoulli_odd_and_limits():
    with pytest.raises(ValueError):
        bernoulli(3)
    assert bernoulli(3, allow_odd=True) == 0
    assert bernoulli(1, allow_odd=True) == Fraction(-1, 2)
    with pytest.raises(ValueError):
        bernoulli(202)
    with pytest.raises(ValueError):
        bernoulli(-2)


def test_k2_coefficients():
    c = k2_series(6).coeffs
    assert c[:3] == (1, Fraction(-1, 12), Fraction(7, 480))
    for l in range(1, 7):
        assert c[l] == (Fraction(2) ** (1 - 2 * l) - 1) * bernoulli(2 * l) / factorial(l)
    with pytest.raises(ValueError):
        k2_series(0)


def test_k2_generic_route_agrees():
    # the Bernoulli formula and the Gaussian-moment route are independent
    assert even_coincidence_series(2, 8).coeffs == k2_series(8).coeffs


def test_k4_leading_coefficient():
    assert k4_series(4)[1] == Fraction(1, 4)
    with pytest.raises(ValueError):
        k4_series(1)


def test_k4_second_coefficient_from_quadrature():
    # fit (series - 1 - t/4)/t^2 at small t against the quadrature kernel
    c2 = k4_series(6)[2]
    ts = np.array([0.004, 0.006, 0.008])
    vals = [p_even(DimensionParams(4), 0.0, t).value * (4 * np.pi * t) ** 2 * np.exp(9 * t / 4) for t in ts]
    resid = [(v - 1 - t / 4) / t**2 for v, t in zip(vals, ts)]
    c3 = float(k4_series(6)[3])
    assert resid[0] - c3 * ts[0] == pytest.approx(float(c2), abs=2e-4)
    assert float(c2) == pytest.approx(-17 / 480, rel=1e-15)


@pytest.mark.parametrize("t", [0.01, 0.03, 0.05])
def test_k2_error_bounded_by_first_omitted_term(t):
    exact = p2(0.0, t).value * 4 * np.pi * t * np.exp(t / 4)
    ser = k2_series(9)
    for count in range(1, 9):
        err = abs(ser.partial_sum(t, count) - exact)
        assert err <= abs(float(ser[count]) * t**count) * (1 + 1e-6) + 1e-13


def test_optimal_truncation_is_asymptotic():
    ser = k2_series(40)
    idx = ser.optimal_truncation(0.5)
    mags = np.abs(ser.terms(0.5))
    assert 1 <= idx < 40
    assert mags[idx] == min(m for m, c in zip(mags[1:], ser.coeffs[1:]) if c != 0)


def test_extract_a_coeffs():
    assert extract_a_coeffs(1).coeffs == (1,)
    assert extract_a_coeffs(2).coeffs == (1, Fraction(2, 3))
    assert extract_a_coeffs(3).coeffs == (1, 2, Fraction(16, 15))
    for k in range(1, 7):
        assert extract_a_coeffs(k)[0] == 1
    with pytest.raises(ValueError):
        extract_a_coeffs(0)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_first_coefficient_matches_curvature(k):
    n = 2 * k + 1
    a1 = extract_a_coeffs(k)[1] if k > 1 else 0
    assert -(k**2) + a1 == Fraction(-n * (n - 1), 6)
    assert diagonal_taylor(n, 1)[1] == Fraction(-n * (n - 1), 6)


@pytest.mark.parametrize("n", [3, 5, 7])
def test_diagonal_taylor_odd(n):
    c = diagonal_taylor(n, 8)
    t = 0.02
    val = p_odd(DimensionParams(n), 0.0, t).value * (4 * np.pi * t) ** (n / 2)
    approx = sum(float(ci) * t**i for i, ci in enumerate(c))
    assert approx == pytest.approx(val, abs=1e-8)


def test_rational_series_container():
    s = RationalSeries((1, Fraction(1, 2)), "test")
    assert len(s) == 2 and s.order == 1 and s[1] == Fraction(1, 2)
    assert s.partial_sum(2.0) == 2.0
