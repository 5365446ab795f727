from fractions import Fraction

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypheat import _kernels
from hypheat.heatkernel import (
    KernelValue,
    Method,
    a_coefficients,
    descend,
    heat_kernel,
    heat_residual,
    massive,
    odd_expression,
    odd_values,
    p1,
    p2,
    p_even,
    p_odd,
    spectral_kernel,
)
from hypheat.hypgeom import DimensionParams
from hypheat.terms import GaussianTermExpr

mp.mp.dps = 30


def mp_p2(r, t):
    """Two-dimensional kernel from its defining integral, at 30 digits."""
    r, t = mp.mpf(r), mp.mpf(t)

    def integrand(v):
        s = mp.acosh(mp.cosh(r) + v * v)
        ratio = s / mp.sinh(s) if s else mp.mpf(1)
        return 2 * ratio * mp.exp(-s * s / (4 * t))

    return mp.sqrt(2) * mp.exp(-t / 4) / (4 * mp.pi * t) ** 1.5 * mp.quad(integrand, [0, 1, mp.inf])


def mp_p4(r, t):
    """``p_4 = -exp(-2t)/(2 pi sinh r) d/dr p_2``."""
    d = mp.diff(lambda x: mp_p2(x, t), r)
    return -mp.exp(-2 * t) / (2 * mp.pi * mp.sinh(r)) * d


def test_p1():
    assert p1(0.0, 1.0).value == pytest.approx(1 / np.sqrt(4 * np.pi), rel=1e-15)
    from scipy import integrate

    total, _ = integrate.quad(lambda r: p1(r, 0.7).value, -np.inf, np.inf, epsabs=1e-13)
    assert total == pytest.approx(1.0, abs=1e-10)
    h = 1e-2
    f = lambda r, t: p1(r, t).value  # noqa: E731
    dt = (f(1, 1 - 2 * h) - 8 * f(1, 1 - h) + 8 * f(1, 1 + h) - f(1, 1 + 2 * h)) / (12 * h)
    drr = (-f(1 - 2 * h, 1) + 16 * f(1 - h, 1) - 30 * f(1, 1) + 16 * f(1 + h, 1) - f(1 + 2 * h, 1)) / (12 * h * h)
    assert abs(dt - drr) < 1e-8


def test_three_dimensional_values():
    assert p_odd(DimensionParams(3), 0.0, 1.0).value == pytest.approx(np.exp(-1) / (4 * np.pi) ** 1.5, rel=1e-14)
    ref = np.exp(-1.25) / np.sinh(1.0) / (4 * np.pi) ** 1.5
    assert p_odd(DimensionParams(3), 1.0, 1.0).value == pytest.approx(ref, rel=1e-14)
    assert p_odd(DimensionParams(3), 1.0, 1.0).value == pytest.approx(0.0054727, abs=1e-7)


@pytest.mark.parametrize("t", [0.01, 0.3, 1.0, 4.0])
def test_five_dimensional_diagonal_is_linear(t):
    val = p_odd(DimensionParams(5), 0.0, t).value
    assert val * (4 * np.pi * t) ** 2.5 * np.exp(4 * t) == pytest.approx(1 + 2 * t / 3, rel=1e-13)


def test_term_list_recurrence():
    # keys are exponents of (r, coth r, csch r, 1/t); (1/sinh r) d/dr exp(-r^2/4t) = -r csch r / 2t
    p3 = odd_expression(3)
    assert p3 == GaussianTermExpr({(1, 0, 1, 1): Fraction(-1, 2)})
    by_hand = {(0, 0, 2, 1): Fraction(-1, 2), (1, 1, 2, 1): Fraction(1, 2), (2, 0, 2, 2): Fraction(1, 4)}
    assert odd_expression(5) == GaussianTermExpr(by_hand)
    assert odd_expression(5) == p3.recurrence_step()


@settings(max_examples=50, deadline=None)
@given(st.floats(0.1, 4.0), st.floats(0.05, 3.0))
def test_odd_kernels_match_nested_differentiation(r, t):
    # p_{n+2} = -exp(-n t) / (2 pi sinh r) d/dr p_n, differentiated numerically at high precision
    def p3(x):
        return (4 * mp.pi * t) ** -1.5 * x / mp.sinh(x) * mp.exp(-(x * x / (4 * t) + t))

    def p5(x):
        return -mp.exp(-3 * t) / (2 * mp.pi * mp.sinh(x)) * mp.diff(p3, x)

    got = odd_values(5, np.array([r]), t)[0]
    assert got == pytest.approx(float(p5(mp.mpf(r))), rel=1e-8)


@pytest.mark.parametrize("r,t", [(0.0, 0.5), (0.5, 0.8), (2.0, 1.0), (1.0, 0.05)])
def test_p2_against_mpmath(r, t):
    v = p2(r, t)
    assert v.method is Method.QUADRATURE
    assert v.value == pytest.approx(float(mp_p2(r, t)), rel=1e-11)


@pytest.mark.parametrize("r,t", [(0.7, 0.5), (1.5, 1.0)])
def test_p4_against_mpmath(r, t):
    assert p_even(DimensionParams(4), r, t).value == pytest.approx(float(mp_p4(r, t)), rel=1e-9)


def test_p2_series_at_small_time():
    t = 0.01
    val = p2(0.0, t).value * 4 * np.pi * t * np.exp(t / 4)
    assert abs(val - (1 - t / 12 + 7 * t**2 / 480)) < 2e-6


def test_p4_series_at_small_time():
    t = 0.01
    val = p_even(DimensionParams(4), 0.0, t).value * (4 * np.pi * t) ** 2 * np.exp(9 * t / 4)
    assert abs(val - 1.0025) < 5e-5


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_positive_and_decreasing(n):
    p = DimensionParams(n)
    vals = [heat_kernel(p, r, 1.0).value for r in np.linspace(0, 6, 13)]
    assert all(v > 0 for v in vals)
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_massive():
    v = p_odd(DimensionParams(3), 0.0, 1.0)
    assert massive(v, 0.0).value == v.value
    assert massive(v, 1.0).value == pytest.approx(np.exp(-2) / (4 * np.pi) ** 1.5, rel=1e-14)
    assert heat_kernel(DimensionParams(3, 1.0), 0.0, 1.0).mass == 1.0
    with pytest.raises(ValueError):
        massive(v, -1.0)


def test_descent():
    assert descend(DimensionParams(3), 0.5, 0.8).value == pytest.approx(p2(0.5, 0.8).value, rel=1e-7)
    assert descend(DimensionParams(5), 1.0, 1.0).value == pytest.approx(
        p_even(DimensionParams(4), 1.0, 1.0).value, rel=1e-6
    )
    assert descend(DimensionParams(4), 0.7, 0.6).value == pytest.approx(
        p_odd(DimensionParams(3), 0.7, 0.6).value, rel=1e-6
    )
    with pytest.raises(ValueError):
        descend(DimensionParams(2), 0.5, 1.0)


def test_spectral_kernel():
    p3 = DimensionParams(3)
    assert spectral_kernel(p3, 1.0, 1.0).value == pytest.approx(p_odd(p3, 1.0, 1.0).value, rel=1e-8)
    assert spectral_kernel(p3, 1e-9, 1.0).value == pytest.approx(np.exp(-1) / (4 * np.pi) ** 1.5, rel=1e-8)
    p5 = DimensionParams(5)
    assert spectral_kernel(p5, 0.5, 0.5).value == pytest.approx(p_odd(p5, 0.5, 0.5).value, rel=1e-7)


@pytest.mark.parametrize("n", [2, 3, 4, 7])
def test_heat_residual(n):
    assert heat_residual(DimensionParams(n), 0.7, 0.5) < 1e-6


def test_a_coefficients():
    assert a_coefficients(3) == (1,)
    assert a_coefficients(5) == (1, Fraction(2, 3))
    assert a_coefficients(7) == (1, 2, Fraction(16, 15))


def test_input_validation():
    with pytest.raises(ValueError):
        p_odd(DimensionParams(4), 0.0, 1.0)
    with pytest.raises(ValueError):
        p_even(DimensionParams(3), 0.0, 1.0)
    with pytest.raises(ValueError):
        p1(0.0, 0.0)
    with pytest.raises(ValueError):
        KernelValue(1.0, 3, 0.0, -1.0)
    with pytest.raises(FloatingPointError):
        KernelValue(np.nan, 3, 0.0, 1.0)


@pytest.mark.skipif(_kernels._eval_terms_compiled is None, reason="compiled backend not built")
@pytest.mark.parametrize("n", [3, 7, 11])
def test_backends_agree(n):
    arrays = odd_expression(n)._arrays
    r = np.linspace(0.6, 6.0, 50)
    a = _kernels.eval_terms_numpy(*arrays, r, 0.8)
    b = _kernels._eval_terms_compiled(*arrays, r, 0.8)
    np.testing.assert_allclose(b, a, rtol=1e-11)
