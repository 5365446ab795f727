import mpmath as mp
import numpy as np
import pytest

from hypheat.fourier import (
    RadialFunction,
    c_abs_squared,
    c_function,
    forward_radial,
    inverse_radial,
    phi_lambda,
    phi_sphere_integral,
    plancherel_density,
    plancherel_norm,
    plancherel_sides,
)
from hypheat.heatkernel import odd_values
from hypheat.hypgeom import DimensionParams
from hypheat.jet import Jet

mp.mp.dps = 30


def mp_phi(n, lam, r):
    """Spherical function as a Gauss hypergeometric function of ``-sinh(r)^2``."""
    rho = mp.mpf(n - 1) / 2
    z = -mp.sinh(mp.mpf(r)) ** 2
    return float(mp.re(mp.hyp2f1((rho + 1j * lam) / 2, (rho - 1j * lam) / 2, mp.mpf(n) / 2, z)))


@pytest.mark.parametrize("n", [2, 3, 4, 5, 7])
def test_phi_at_origin(n):
    assert phi_lambda(DimensionParams(n), 1.3, 0.0) == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize("lam", [0.0, 0.4, 1.7, 6.0])
@pytest.mark.parametrize("r", [0.1, 0.9, 3.0, 12.0])
def test_phi_three_dimensions_closed_form(lam, r):
    ref = r / np.sinh(r) if lam == 0 else np.sin(lam * r) / (lam * np.sinh(r))
    assert phi_lambda(DimensionParams(3), lam, r) == pytest.approx(ref, rel=1e-11, abs=1e-14 * np.exp(-r))


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6, 7])
@pytest.mark.parametrize("lam,r", [(0.3, 0.4), (1.1, 1.5), (2.5, 2.2), (0.7, 5.0)])
def test_phi_against_hypergeometric(n, lam, r):
    ref = mp_phi(n, lam, r)
    scale = np.exp(-(n - 1) / 2 * r)
    assert float(phi_lambda(DimensionParams(n), lam, r)) == pytest.approx(ref, rel=1e-9, abs=1e-12 * scale)


def test_phi_array_and_jet():
    p = DimensionParams(5)
    r = np.array([0.0, 0.3, 1.0, 4.0])
    vals = phi_lambda(p, 0.8, r)
    assert vals.shape == r.shape
    for ri, vi in zip(r, vals):
        assert vi == pytest.approx(float(phi_lambda(p, 0.8, float(ri))), rel=1e-13)
    jet = phi_lambda(p, 0.8, Jet.variable(1.0))
    h = 1e-4
    fd = (phi_lambda(p, 0.8, 1 + h) - phi_lambda(p, 0.8, 1 - h)) / (2 * h)
    assert jet.d1 == pytest.approx(fd, rel=1e-7)


def test_phi_sphere_integral_derivatives():
    v, d1, d2 = phi_sphere_integral(3, 1.2, 0.8, derivatives=2)
    f = lambda r: np.sin(1.2 * r) / (1.2 * np.sinh(r))  # noqa: E731
    h = 1e-3
    assert v.real == pytest.approx(f(0.8), rel=1e-11)
    assert d1.real == pytest.approx((f(0.8 + h) - f(0.8 - h)) / (2 * h), rel=1e-6)
    assert d2.real == pytest.approx((f(0.8 + h) - 2 * f(0.8) + f(0.8 - h)) / h**2, rel=1e-5)


def test_phi_rejects_negative_inputs():
    with pytest.raises(ValueError):
        phi_lambda(DimensionParams(3), -1.0, 0.5)
    with pytest.raises(ValueError):
        phi_lambda(DimensionParams(3), 1.0, -0.5)


@pytest.mark.parametrize("n", [3, 5, 7])
@pytest.mark.parametrize("lam", [0.2, 1.0, 3.5])
def test_plancherel_density_matches_c_function(n, lam):
    p = DimensionParams(n)
    assert plancherel_density(p, lam) == pytest.approx(abs(c_function(p, lam)) ** -2, rel=1e-12)
    assert c_abs_squared(p, lam) * plancherel_density(p, lam) == pytest.approx(1.0, rel=1e-15)


def test_plancherel_density_three_dimensions_exact():
    lam = np.linspace(0.1, 5.0, 11)
    assert np.array_equal(plancherel_density(DimensionParams(3), lam), lam * lam)


def test_c_function_governs_large_radius():
    # Phi_lambda(r) ~ 2 Re[c(lambda) exp((i lambda - rho) r)] for large r
    p, lam, r = DimensionParams(5), 0.9, 40.0
    c = c_function(p, lam)
    lead = 2 * (c * np.exp(1j * lam * r)).real * np.exp(-2 * r)
    assert float(phi_lambda(p, lam, r)) == pytest.approx(lead, rel=1e-8)


def test_closed_form_errors():
    with pytest.raises(ValueError):
        plancherel_density(DimensionParams(4), 1.0)
    with pytest.raises(ZeroDivisionError):
        c_abs_squared(DimensionParams(3), 0.0)
    with pytest.raises(ValueError):
        inverse_radial(lambda lam: lam, DimensionParams(4), 0.5)
    with pytest.raises(ValueError):
        RadialFunction(np.exp, decay="compact")
    with pytest.raises(ValueError):
        RadialFunction(np.exp, decay="power")


@pytest.mark.parametrize("n", [3, 5])
@pytest.mark.parametrize("lam", [0.0, 0.6, 2.0])
def test_forward_of_heat_kernel_is_exponential(n, lam):
    t = 0.5
    p = DimensionParams(n)
    kernel = lambda r: odd_values(n, np.atleast_1d(r), t)  # noqa: E731
    rho2 = ((n - 1) / 2) ** 2
    assert forward_radial(kernel, p, lam) == pytest.approx(np.exp(-(lam * lam + rho2) * t), rel=1e-10)


@pytest.mark.parametrize("r", [0.0, 0.5, 2.0])
def test_inverse_of_exponential_is_heat_kernel(r):
    t = 0.5
    p = DimensionParams(3)
    got = inverse_radial(lambda lam: np.exp(-(lam * lam + 1) * t), p, r, decay=t)
    assert got == pytest.approx(odd_values(3, np.array([r]), t)[0], rel=1e-10)


def test_round_trip_gaussian():
    p = DimensionParams(5)
    f = RadialFunction(lambda r: np.exp(-r * r))
    ft = np.vectorize(lambda lam: forward_radial(f, p, float(lam)))
    for r in (0.0, 0.7, 1.5):
        assert inverse_radial(ft, p, r, decay=0.2, rtol=1e-10) == pytest.approx(np.exp(-r * r), rel=1e-8)


def test_forward_compact_support():
    p = DimensionParams(3)
    bump = RadialFunction(lambda r: np.where(r < 1, 1.0, 0.0), "compact", 1.0)
    # sphere area times int_0^1 sin(lam r) sinh(r) / lam dr
    lam = 1.5
    inner = (np.cosh(1) * np.sin(lam) - lam * np.sinh(1) * np.cos(lam)) / (1 + lam * lam) / lam
    assert forward_radial(bump, p, lam) == pytest.approx(4 * np.pi * inner, rel=1e-12)


def test_plancherel_identity():
    p = DimensionParams(3)
    f = RadialFunction(lambda r: np.exp(-r * r))
    spatial, spectral = plancherel_sides(f, p)
    assert spectral == pytest.approx(spatial, rel=1e-9)
    assert plancherel_norm(f, p) == pytest.approx(spatial, rel=1e-9)
