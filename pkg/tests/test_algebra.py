from fractions import Fraction

import numpy as np
import pytest
import sympy
from scipy import special

from hypheat.jet import Jet, value
from hypheat.quadrature import ConvergenceError, gauss_kronrod, integrate, integrate_to_infinity
from hypheat.series import RadialSeries, cosh_series, r_coth_r, r_csch_r, sinh_over_r
from hypheat.terms import GaussianTermExpr


def sympy_coeffs(expr, order):
    x = sympy.Symbol("x")
    ser = sympy.series(expr(x), x, 0, order + 1).removeO()
    return [Fraction(str(ser.coeff(x, j))) for j in range(order + 1)]


# ---------------------------------------------------------------- series


@pytest.mark.parametrize(
    "func,ref",
    [
        (sinh_over_r, lambda x: sympy.sinh(x) / x),
        (cosh_series, sympy.cosh),
        (r_csch_r, lambda x: x / sympy.sinh(x)),
        (r_coth_r, lambda x: x * sympy.cosh(x) / sympy.sinh(x)),
    ],
)
def test_standard_series_against_sympy(func, ref):
    assert list(func(14).coeffs) == sympy_coeffs(ref, 14)


def test_series_arithmetic():
    s = r_csch_r(10)
    one = RadialSeries.constant(1, 10)
    assert s * s.reciprocal() == one
    assert s.power(Fraction(1, 2)) * s.power(Fraction(1, 2)) == s
    assert (s + 1 - s) == one
    assert (2 * s) / 2 == s
    assert s.is_even and not RadialSeries([0, 1]).is_even
    assert cosh_series(8).derivative() == sinh_over_r(9).shift_up(1).truncate(7)
    assert RadialSeries.monomial(3, 5, 2).shift_down(3) == RadialSeries([2], 2)
    x = np.array([0.1, 0.4])
    np.testing.assert_allclose(r_csch_r(24)(x), x / np.sinh(x), rtol=1e-14)


def test_series_errors():
    with pytest.raises(ZeroDivisionError):
        RadialSeries([0, 1], 3).reciprocal()
    with pytest.raises(ValueError):
        RadialSeries([2, 1], 3).power(Fraction(1, 2))
    with pytest.raises(ValueError):
        RadialSeries([1, 1], 3).shift_down(1)
    with pytest.raises(ValueError):
        RadialSeries([1], 0).derivative()
    with pytest.raises(IndexError):
        RadialSeries([1, 2], 1)[2]


# ---------------------------------------------------------------- terms


def sample_expr():
    return GaussianTermExpr({(2, 1, 1, 1): Fraction(1, 3), (0, 0, 2, 2): -1, (1, 0, 0, 0): 2})


def test_term_derivatives_match_finite_differences():
    e = sample_expr()
    r, t, h = 1.3, 0.7, 1e-4
    f = lambda r_, t_: float(e.evaluate(r_, t_)[0])  # noqa: E731
    dr = (f(r + h, t) - f(r - h, t)) / (2 * h)
    dt = (f(r, t + h) - f(r, t - h)) / (2 * h)
    assert float(e.diff_r().evaluate(r, t)[0]) == pytest.approx(dr, rel=1e-7)
    assert float(e.diff_t().evaluate(r, t)[0]) == pytest.approx(dt, rel=1e-7)


def test_term_algebra():
    e = sample_expr()
    assert e + e == e.scale(2)
    assert len(GaussianTermExpr.unit()) == 1
    assert e.mul_coth().recurrence_step() == e.mul_coth().diff_r().mul_csch()
    assert GaussianTermExpr() == GaussianTermExpr({(0, 0, 0, 0): 0})
    assert e.max_d == 2
    with pytest.raises(ValueError):
        GaussianTermExpr({(-1, 0, 0, 0): 1})


def test_series_branch_is_continuous():
    # the five-dimensional term list switches to its Taylor series at the edge
    e = GaussianTermExpr({(1, 0, 1, 1): Fraction(-1, 2)}).recurrence_step()
    edge = 0.5
    inside = float(e.prefactor(edge * (1 - 1e-12), 0.6)[0])
    outside = float(e.prefactor(edge * (1 + 1e-12), 0.6)[0])
    assert inside == pytest.approx(outside, rel=1e-11)
    assert np.isfinite(e.prefactor(0.0, 0.6)[0])


def test_singular_expression_rejected():
    with pytest.raises(ValueError):
        GaussianTermExpr({(0, 0, 1, 0): 1}).prefactor_series(6)


# ---------------------------------------------------------------- jet


def test_jet_chain_rule():
    def f(x):
        return np.exp(np.sin(x)) * np.sqrt(x) / np.cosh(x) + special.erfcx(x) - np.log(x) ** 2 + 3 / x

    x0, h = 0.8, 1e-4
    j = f(Jet.variable(x0))
    assert j.v == pytest.approx(f(x0), rel=1e-15)
    assert j.d1 == pytest.approx((f(x0 + h) - f(x0 - h)) / (2 * h), rel=1e-7)
    assert j.d2 == pytest.approx((f(x0 + h) - 2 * f(x0) + f(x0 - h)) / h**2, rel=1e-5)


def test_jet_powers_and_helpers():
    x = Jet.variable(2.0)
    cube = x**3
    assert (cube.v, cube.d1, cube.d2) == (8.0, 12.0, 12.0)
    half = x**0.5
    assert half.d2 == pytest.approx(-0.25 * 2.0**-1.5)
    assert (2.0**x).d1 == pytest.approx(4 * np.log(2))
    assert (x**0).d1 == 0.0
    assert abs(-x).d1 == 1.0
    assert x > 1 and x <= 2 and float(x) == 2.0
    assert value(x) == 2.0 and value(3.0) == 3.0
    arr = np.tanh(Jet.variable(np.array([0.1, 0.2])))
    np.testing.assert_allclose(arr.d1, 1 - np.tanh([0.1, 0.2]) ** 2)


# ---------------------------------------------------------------- quadrature


def test_gauss_kronrod_basic():
    res = gauss_kronrod(np.sin, 0.0, np.pi)
    assert res.value == pytest.approx(2.0, rel=1e-14)
    assert res.error < 1e-12 and res.intervals >= 1
    assert integrate(lambda x: np.exp(-((x - 0.3) ** 2) * 1e4), -1, 1) == pytest.approx(np.sqrt(np.pi) / 100, rel=1e-12)
    assert integrate_to_infinity(lambda x: np.exp(-x), 0.0) == pytest.approx(1.0, rel=1e-13)
    cval = gauss_kronrod(lambda x: np.exp(1j * x), 0.0, np.pi).value
    assert cval == pytest.approx(2j, rel=1e-13)


def test_gauss_kronrod_breakpoints_and_failure():
    edges = np.array([0.0, 0.5, 1.0])
    assert gauss_kronrod(lambda x: np.abs(x - 0.5), 0, 1, initial=edges).value == pytest.approx(0.25, rel=1e-14)
    with pytest.raises(ConvergenceError):
        gauss_kronrod(lambda x: x**-0.99, 0.0, 1.0, max_intervals=10)
