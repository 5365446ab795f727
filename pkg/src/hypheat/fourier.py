"""Radial harmonic analysis on hyperbolic space.

Spherical functions ``Phi_lambda`` (the radial Laplacian eigenfunctions with
``Phi_lambda(0) = 1`` and eigenvalue ``-(lambda^2 + rho^2)``), the
Harish-Chandra c-function, and the radial Fourier transform pair.

``Phi_lambda`` is evaluated by one of three routes:

* a hypergeometric power series in ``-sinh(r)^2`` for small ``r``;
* in odd dimensions, a finite sum of elementary antiderivatives;
* in even dimensions (and for complex ``lambda``), an integral over the
  sphere written on a logarithmic scale and done by adaptive quadrature.

All three accept a :class:`~hypheat.jet.Jet` radius so that exact radial
derivatives are available.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Callable, Literal

import numpy as np
from scipy import special

from .hypgeom import DimensionParams
from .jet import Jet
from .quadrature import ConvergenceError, gauss_kronrod

#: Radius below which the hypergeometric series is used (with ``lambda sinh r`` small).
SERIES_RADIUS = 0.6
SERIES_LAMBDA_RADIUS = 3.0
_SERIES_TERMS = 64
#: Relative size of the discarded tail when truncating transform integrals.
TAIL_BOUND = 1e-14


# ---------------------------------------------------------------------------
# spherical functions


def _series_coeffs(n: int, lam) -> np.ndarray:
    """Taylor coefficients of ``Phi_lambda`` in ``z = -sinh(r)^2``."""
    lam = np.asarray(lam, dtype=float)
    rho = (n - 1) / 2
    out = np.empty((_SERIES_TERMS,) + lam.shape)
    out[0] = 1.0
    for j in range(_SERIES_TERMS - 1):
        out[j + 1] = out[j] * ((rho / 2 + j) ** 2 + lam * lam / 4) / ((n / 2 + j) * (j + 1))
    return out


def _phi_series(n: int, lam, r):
    z = -np.sinh(r) ** 2
    cs = _series_coeffs(n, lam)
    acc = cs[-1]
    for c in cs[-2::-1]:
        acc = acc * z + c
    return acc


def _cosh_power_integrals(lam, r, pmax: int) -> list:
    """``I_p = int_0^r cos(lam s) cosh(s)^p ds`` for ``p = 0..pmax``.

    Uses ``(lam^2 + p^2) I_p = cosh^{p-1} r (lam sin(lam r) cosh r
    + p cos(lam r) sinh r) + p (p - 1) I_{p-2}``.
    """
    sl, cl = np.sin(lam * r), np.cos(lam * r)
    ch, sh = np.cosh(r), np.sinh(r)
    lam2 = lam * lam
    out = [sl / lam]
    if pmax >= 1:
        out.append((lam * sl * ch + cl * sh) / (lam2 + 1))
    chp = ch  # cosh^{p-1} for p = 2
    for p in range(2, pmax + 1):
        out.append((chp * (lam * sl * ch + p * cl * sh) + p * (p - 1) * out[p - 2]) / (lam2 + p * p))
        chp = chp * ch
    return out


def _phi_odd(n: int, lam, r):
    """Finite-sum form for odd ``n``; ``lam > 0``."""
    rho = (n - 1) // 2
    pref = 2.0**rho * special.gamma(rho + 0.5) / (np.sqrt(np.pi) * special.gamma(rho))
    ints = _cosh_power_integrals(lam, r, rho - 1)
    ch = np.cosh(r)
    acc = 0.0
    for l in range(rho):
        acc = acc + comb(rho - 1, l) * (-1) ** l * ch ** (rho - 1 - l) * ints[l]
    return pref * acc / np.sinh(r) ** (2 * rho - 1)


def _sphere_integrand_logs(rho: float, lam: complex, r: float, w: np.ndarray):
    """Log of the integrand of the logarithmic-scale sphere integral, and the
    weight ``q`` needed for its ``r``-derivatives."""
    s = 1j * lam - rho
    lg1 = np.logaddexp(0.0, 2 * w)
    lg2 = np.logaddexp(0.0, 2 * w - 2 * r)
    logf = 2 * rho * w - (1j * lam + rho) * lg1 + s * r + s * lg2
    q = special.expit(2 * w - 2 * r)
    return logf, s, q


def _sphere_window(rho: float, lam: complex, r: float) -> tuple[float, float]:
    """Interval in ``w = log u`` outside which the integrand is negligible."""
    decay = max(rho - abs(np.imag(lam)), 0.05)
    span = np.log(1 / TAIL_BOUND) + 6
    lo = -span / (2 * rho)
    hi = r + span / (2 * decay)
    return lo, hi


def phi_sphere_integral(n: int, lam: complex, r: float, derivatives: int = 0, rtol: float = 1e-12):
    """``Phi_lambda(r)`` (and optionally its first two ``r``-derivatives) by quadrature.

    Works for complex ``lam`` with ``|Im lam| < rho``; returns complex values.
    """
    rho = (n - 1) / 2
    pref = 2 ** (2 * rho) * special.gamma(rho + 0.5) / (np.sqrt(np.pi) * special.gamma(rho))
    lo, hi = _sphere_window(rho, lam, r)
    panels = int(np.clip(np.ceil((hi - lo) * (1 + abs(lam)) / 2), 8, 400))

    def make(order):
        def f(w):
            logf, s, q = _sphere_integrand_logs(rho, lam, r, w)
            val = np.exp(logf)
            if order == 0:
                return val
            d1 = s * (1 - 2 * q)
            if order == 1:
                return val * d1
            return val * (d1 * d1 + 4 * s * q * (1 - q))

        return f

    out = []
    for order in range(derivatives + 1):
        res = gauss_kronrod(make(order), lo, hi, rtol=rtol, initial=panels, fail_rtol=1e-8)
        out.append(pref * res.value)
    return out[0] if derivatives == 0 else tuple(out)


def _phi_even_scalar(n: int, lam: float, r):
    if isinstance(r, Jet):
        v, d1, d2 = phi_sphere_integral(n, lam, float(r.v), derivatives=2)
        v, d1, d2 = v.real, d1.real, d2.real
        return Jet(v, d1 * r.d1, d2 * r.d1 * r.d1 + d1 * r.d2)
    return phi_sphere_integral(n, lam, float(r)).real


def phi_lambda(p: DimensionParams, lam: float, r):
    """Spherical function ``Phi_lambda(r)``.

    Parameters
    ----------
    p
        Dimension.
    lam
        Spectral parameter ``lambda >= 0``.
    r
        Radius: a nonnegative scalar, an array, or a :class:`Jet`.

    Returns
    -------
    float, ndarray or Jet
        Same kind as ``r``.
    """
    if lam < 0:
        raise ValueError("spectral parameter must be nonnegative")
    if isinstance(r, Jet):
        return _phi_jet(p, float(lam), r)
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr < 0):
        raise ValueError("radius must be nonnegative")
    return _phi_array(p.n, float(lam), r_arr)


def _use_series(lam, r) -> np.ndarray:
    return (np.abs(r) < SERIES_RADIUS) & (lam * np.sinh(np.abs(r)) <= SERIES_LAMBDA_RADIUS)


def _phi_array(n: int, lam, r):
    """Broadcasting evaluation over arrays of ``lam`` and ``r`` (real only)."""
    lam_b, r_b = np.broadcast_arrays(np.asarray(lam, dtype=float), np.asarray(r, dtype=float))
    out = np.empty(lam_b.shape)
    series = _use_series(lam_b, r_b)
    if np.any(series):
        out[series] = _phi_series(n, lam_b[series], r_b[series])
    rest = ~series
    if np.any(rest):
        if n % 2 == 1:
            lr, rr = lam_b[rest], r_b[rest]
            safe = np.where(lr > 0, lr, 1.0)
            vals = _phi_odd(n, safe, rr)
            if np.any(lr == 0):
                # lambda = 0 is the limit of the finite sum; take it by series in lambda
                eps = 1e-6
                v1 = _phi_odd(n, np.full_like(rr, eps), rr)
                v2 = _phi_odd(n, np.full_like(rr, 2 * eps), rr)
                vals = np.where(lr > 0, vals, (4 * v1 - v2) / 3)
            out[rest] = vals
        else:
            out[rest] = [_phi_even_scalar(n, lv, rv) for lv, rv in zip(lam_b[rest], r_b[rest])]
    return out if out.ndim else float(out)


def _phi_jet(p: DimensionParams, lam, r: Jet):
    """Jet evaluation; ``lam`` may be an array (broadcast against a scalar radius)."""
    rv = float(r.v)
    if rv == 0:
        # Phi is even with Phi''(0) = -(lam^2 + rho^2)/n
        curv = -(np.asarray(lam) ** 2 + float(p.rho) ** 2) / p.n
        return Jet(np.ones_like(curv), 0.0 * curv, curv * r.d1 * r.d1)
    lam_arr = np.asarray(lam, dtype=float)
    series = _use_series(lam_arr, rv)
    if np.all(series):
        return _phi_series(p.n, lam_arr, r)
    if p.is_odd and np.all(lam_arr > 0) and not np.any(series):
        return _phi_odd(p.n, lam_arr, r)
    if lam_arr.ndim == 0:
        if p.is_odd:
            return _phi_odd(p.n, max(float(lam_arr), 1e-12), r)
        return _phi_even_scalar(p.n, float(lam_arr), r)
    # mixed branches across a lambda array: evaluate each element
    parts = [_phi_jet(p, float(lv), r) for lv in lam_arr.ravel()]
    return Jet(
        np.array([j.v for j in parts]).reshape(lam_arr.shape),
        np.array([j.d1 for j in parts]).reshape(lam_arr.shape),
        np.array([j.d2 for j in parts]).reshape(lam_arr.shape),
    )


# ---------------------------------------------------------------------------
# c-function and Plancherel density


def c_function(p: DimensionParams, lam: complex) -> complex:
    """Harish-Chandra c-function ``2^{2rho-1} Gamma(rho+1/2) Gamma(i lam) / (sqrt(pi) Gamma(rho + i lam))``."""
    rho = float(p.rho)
    z = 1j * complex(lam)
    logc = (
        (2 * rho - 1) * np.log(2)
        + special.gammaln(rho + 0.5)
        + special.loggamma(z)
        - special.loggamma(rho + z)
        - 0.5 * np.log(np.pi)
    )
    return complex(np.exp(logc))


def _c_prefactor(p: DimensionParams) -> float:
    """``4^{2 rho - 1} Gamma(rho + 1/2)^2 / pi``; an exact integer for odd ``n``."""
    if p.is_odd:
        rho = p.k
        double_fact = 1
        for j in range(1, 2 * rho, 2):
            double_fact *= j
        return float(4 ** (rho - 1) * double_fact**2)
    rho = float(p.rho)
    return 4 ** (2 * rho - 1) * special.gamma(rho + 0.5) ** 2 / np.pi


def plancherel_density(p: DimensionParams, lam):
    """``|c(lambda)|^{-2}`` for odd ``n``: a polynomial in ``lambda``."""
    if not p.is_odd:
        raise ValueError("closed-form Plancherel density needs an odd dimension")
    lam = np.asarray(lam, dtype=float)
    rho = p.k
    prod = np.ones_like(lam)
    for l in range(1, rho + 1):
        prod = prod * ((rho - l) ** 2 + lam * lam)
    out = prod / _c_prefactor(p)
    return out if out.ndim else float(out)


def c_abs_squared(p: DimensionParams, lam: float) -> float:
    """``|c(lambda)|^2`` for odd ``n`` and ``lambda > 0``."""
    if not p.is_odd:
        raise ValueError("closed-form |c|^2 needs an odd dimension")
    if lam <= 0:
        raise ZeroDivisionError("|c(lambda)|^2 is singular at lambda = 0")
    return float(1.0 / plancherel_density(p, lam))


def inverse_prefactor(p: DimensionParams) -> float:
    """Constant ``2^{2 rho} / (2 pi omega_{n-1})`` of the inverse transform."""
    return 2 ** (2 * float(p.rho)) / (2 * np.pi * p.sphere_area)


# ---------------------------------------------------------------------------
# transforms


@dataclass(frozen=True)
class RadialFunction:
    """Radial function ``r -> f(r)`` with a declared decay class.

    ``support`` is required for compactly supported functions; for
    Gaussian-decay functions the truncation radius is found by scanning.
    """

    func: Callable[[np.ndarray], np.ndarray]
    decay: Literal["compact", "gaussian"] = "gaussian"
    support: float | None = None

    def __post_init__(self):
        if self.decay not in ("compact", "gaussian"):
            raise ValueError(f"unknown decay class {self.decay!r}")
        if self.decay == "compact" and not (self.support and self.support > 0):
            raise ValueError("compactly supported functions need a positive support radius")

    def __call__(self, r):
        return self.func(r)


def _as_radial(f) -> RadialFunction:
    return f if isinstance(f, RadialFunction) else RadialFunction(f)


def _log_sinh_power(n: int) -> Callable[[np.ndarray], np.ndarray]:
    return lambda r: (n - 1) * (r - np.log(2) + np.log1p(-np.exp(-2 * r)))


def _truncation_radius(f: RadialFunction, log_weight: Callable[[np.ndarray], np.ndarray]) -> float:
    if f.decay == "compact":
        return float(f.support)
    grid = np.concatenate([np.linspace(0.05, 1.0, 20), 2.0 ** np.arange(1, 10)])
    with np.errstate(divide="ignore"):
        logs = np.log(np.abs(np.asarray(f(grid), dtype=float))) + log_weight(grid)
    if not np.any(np.isfinite(logs)):
        return 1.0
    ipk = int(np.nanargmax(logs))
    cut = logs[ipk] + np.log(TAIL_BOUND * 1e-2)
    for g, lg in zip(grid[ipk + 1 :], logs[ipk + 1 :]):
        if lg < cut:
            return float(g)
    raise ConvergenceError("radial function does not decay fast enough to truncate")


def forward_radial(f, p: DimensionParams, lam: float, rtol: float = 1e-12) -> float:
    """``omega_{n-1} int_0^inf f(r) Phi_lambda(r) sinh(r)^{n-1} dr``."""
    f = _as_radial(f)
    n = p.n
    r_max = _truncation_radius(f, _log_sinh_power(n))

    def integrand(r):
        return np.asarray(f(r), dtype=float) * _phi_array(n, lam, r) * np.sinh(r) ** (n - 1)

    panels = int(np.clip(np.ceil(r_max * (1 + lam) / 2), 8, 200))
    res = gauss_kronrod(integrand, 0.0, r_max, rtol=rtol, atol=1e-300, initial=panels)
    return float(p.sphere_area * res.value)


def _spectral_cutoff(ft: Callable, p: DimensionParams, decay: float | None) -> float:
    dens = lambda lam: plancherel_density(p, lam)  # noqa: E731
    if decay is not None and decay > 0:
        # Gaussian exp(-decay lam^2) against a polynomial of degree 2 rho
        lam = 1.0
        while np.exp(-decay * lam * lam) * max(1.0, lam) ** (2 * p.k) > TAIL_BOUND * 1e-2:
            lam *= 1.25
        return lam
    grid = 2.0 ** np.arange(-2, 12)
    mags = np.abs(np.asarray(ft(grid), dtype=float).ravel()) * dens(grid)
    peak = mags.max()
    if peak == 0:
        return 1.0
    ipk = int(np.argmax(mags))
    for g, m in zip(grid[ipk + 1 :], mags[ipk + 1 :]):
        if m < TAIL_BOUND * peak * 1e-2:
            return float(g)
    raise ConvergenceError("spectral function does not decay fast enough to truncate")


def inverse_radial(
    ft: Callable, p: DimensionParams, r, decay: float | None = None, rtol: float = 1e-12
):
    """``2^{2 rho}/(2 pi omega_{n-1}) int_0^inf ft(lam) Phi_lam(r) |c(lam)|^{-2} dlam``.

    ``ft`` must be vectorized.  ``decay``, if given, declares
    ``|ft(lam)| <~ exp(-decay lam^2)`` and fixes the cutoff directly.  A
    :class:`Jet` radius returns a Jet holding the radial derivatives.
    """
    if not p.is_odd:
        raise ValueError("inverse transform is implemented for odd dimensions")
    lam_max = _spectral_cutoff(ft, p, decay)
    c = inverse_prefactor(p)
    n = p.n
    rv = float(r.v) if isinstance(r, Jet) else float(r)
    panels = int(np.clip(np.ceil(lam_max * (1 + rv) / 2), 8, 400))

    if not isinstance(r, Jet):

        def integrand(lam):
            return np.asarray(ft(lam), dtype=float) * _phi_array(n, lam, r) * plancherel_density(p, lam)

        res = gauss_kronrod(integrand, 0.0, lam_max, rtol=rtol, atol=1e-300, initial=panels)
        return float(c * res.value)

    parts = []
    for comp in ("v", "d1", "d2"):

        def integrand(lam, comp=comp):
            jet = _phi_jet(p, lam, r)
            return np.asarray(ft(lam), dtype=float) * getattr(jet, comp) * plancherel_density(p, lam)

        parts.append(c * gauss_kronrod(integrand, 0.0, lam_max, rtol=rtol, atol=1e-300, initial=panels).value)
    return Jet(*parts)


def plancherel_sides(f, p: DimensionParams, rtol: float = 1e-11) -> tuple[float, float]:
    """Spatial and spectral squared norms of ``f``, computed independently."""
    f = _as_radial(f)
    n = p.n
    r_max = _truncation_radius(f, _log_sinh_power(n))
    spatial = p.sphere_area * gauss_kronrod(
        lambda r: np.asarray(f(r), dtype=float) ** 2 * np.sinh(r) ** (n - 1), 0.0, r_max, rtol=rtol, atol=1e-300
    ).value

    @lru_cache(maxsize=None)
    def fwd(lam: float) -> float:
        return forward_radial(f, p, lam, rtol=rtol)

    def spec_integrand(lams):
        return np.array([fwd(float(l)) ** 2 for l in lams]) * plancherel_density(p, lams)

    lam_max = _spectral_cutoff(lambda lams: np.array([fwd(float(l)) ** 2 for l in np.atleast_1d(lams)]), p, None)
    spectral = inverse_prefactor(p) * gauss_kronrod(
        spec_integrand, 0.0, lam_max, rtol=rtol, atol=1e-300, initial=8
    ).value
    return float(spatial), float(spectral)


def plancherel_norm(f, p: DimensionParams, rtol: float = 1e-6) -> float:
    """Spectral-side squared norm, checked against the spatial side to ``rtol``."""
    spatial, spectral = plancherel_sides(f, p)
    scale = max(abs(spatial), abs(spectral))
    if scale > 0 and abs(spatial - spectral) > rtol * scale:
        raise ConvergenceError(
            f"Plancherel sides disagree: spatial {spatial!r} vs spectral {spectral!r}"
        )
    return spectral
