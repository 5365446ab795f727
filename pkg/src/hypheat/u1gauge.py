"""Heat kernel of a U(1) gauge field (Feynman gauge) on odd-dimensional hyperbolic space.

The kernel is written as ``K_{mu nu'} = (d_mu d_nu' u) F + d_mu d_nu' Q``
with ``u`` the chordal distance.  ``F`` solves a shifted scalar heat
equation and is a multiple of the scalar kernel; ``Q`` is driven by ``F``
and is obtained through the radial Fourier transform.  The fibre trace at
coincidence is ``-n lim_{r->0} [F + (1/sinh r) dQ/dr]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import special

from .fourier import RadialFunction, forward_radial, inverse_prefactor, inverse_radial, plancherel_density
from .heatkernel import odd_expression, odd_prefactor, odd_values
from .hypgeom import DimensionParams, HalfSpacePoint, chordal_u
from .jet import Jet
from .quadrature import ConvergenceError, gauss_kronrod

#: Largest exponent accepted before a closed form is declared to overflow.
EXPONENT_GUARD = 700.0
#: Above this time the xi-integral of the closed form switches from
#: Gauss-Legendre to its erfcx expression (the integrand peaks with width
#: ``1/sqrt(t)``).
XI_CLOSED_TIME = 20.0
#: Switch from the erfcx recurrence to its asymptotic series.
ERFCX_ASYMPTOTIC = 6.0
IDENTITY_TOL = 1e-6
#: Largest time for the spectral route to ``Q``: the spectral function holds
#: a term growing like ``exp((1 - lambda^2) t)`` that cancels under the
#: integral, so roughly ``t / 2.3`` digits are lost.
SPECTRAL_MAX_TIME = 15.0

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(40)


def _require_odd(p: DimensionParams) -> None:
    if not p.is_odd:
        raise ValueError("the U(1) kernel is implemented for odd dimensions")


def _check_spectral_time(t: float) -> None:
    if t > SPECTRAL_MAX_TIME:
        raise ConvergenceError(
            f"spectral route to Q is ill-conditioned at t = {t} > {SPECTRAL_MAX_TIME}; use the closed form (n = 3)"
        )


def _check_t(t: float) -> float:
    t = float(t)
    if not (t > 0 and np.isfinite(t)):
        raise ValueError(f"time must be positive and finite, got {t}")
    return t


# ---------------------------------------------------------------------------
# the F component


def f_component(p: DimensionParams, m: float, t: float, r):
    """``F(t, r) = -exp((n - 2 - m^2) t) p_n(r, t)``.

    This is the solution of ``dF/dt = (Laplacian + n - 2 - m^2) F`` with
    ``F(0) = -delta``.  In three dimensions it reduces to
    ``-exp(-m^2 t) (4 pi t)^{-3/2} (r / sinh r) exp(-r^2/4t)``.
    """
    _require_odd(p)
    t = _check_t(t)
    out = -odd_values(p.n, np.abs(np.atleast_1d(r)), t, shift=(p.n - 2 - m * m) * t)
    return out if np.ndim(r) else float(out[0])


def q_source(p: DimensionParams, m: float, t: float, r):
    """``-2 int_r^inf F(t, s) sinh(s) ds`` in closed form.

    Since ``F`` is ``(1/sinh r) d/dr`` of a lower-dimensional term list, the
    integral is that term list evaluated at ``r``.
    """
    _require_odd(p)
    t = _check_t(t)
    r = np.abs(np.atleast_1d(np.asarray(r, dtype=float)))
    lower = odd_expression(p.n - 2).evaluate(r, t)
    out = -2 * odd_prefactor(p.n, t, shift=(p.n - 2 - m * m) * t) * lower
    return out if out.size > 1 else float(out[0])


# ---------------------------------------------------------------------------
# the Q component in the spectral domain


def _xi_integral(b: float, t: float, lam):
    """``int_0^1 exp(b t xi) sin(2 t lam xi) dxi``."""
    lam = np.asarray(lam, dtype=float)
    alpha, beta = b * t, 2 * t * lam
    if alpha > EXPONENT_GUARD:
        raise OverflowError(f"exponent {alpha} exceeds the guard")
    xi = 0.5 * (_GL_NODES + 1)
    small = alpha + np.abs(beta) < 2.0
    out = np.empty_like(beta)
    if np.any(small):
        bs = beta[small][..., None]
        out[small] = 0.5 * np.sum(_GL_WEIGHTS * np.exp(alpha * xi) * np.sin(bs * xi), axis=-1)
    big = ~small
    if np.any(big):
        bb = beta[big]
        out[big] = (np.exp(alpha) * (alpha * np.sin(bb) - bb * np.cos(bb)) + bb) / (alpha**2 + bb**2)
    return out


def q_tilde(lam, t: float, p: DimensionParams, m: float = 0.0):
    """Spectral ``Q~(t, lambda)`` for odd ``n``.

    ``exp(-a t) [1/a + 4 (-1)^rho / (b^2 + 4 lam^2)
    + 2 (-1)^(rho-1) (t/lam) int_0^1 exp(b t xi) sin(2 t lam xi) dxi]`` with
    ``a = lam^2 + rho^2 + m^2`` and ``b = 1 + rho^2 + m^2``.
    """
    _require_odd(p)
    t = float(t)
    if t < 0:
        raise ValueError("time must be nonnegative")
    lam_arr = np.asarray(lam, dtype=float)
    if np.any(lam_arr <= 0):
        raise ValueError("q_tilde needs lambda > 0")
    rho = p.k
    a = lam_arr**2 + rho * rho + m * m
    b = 1 + rho * rho + m * m
    sign = (-1) ** rho
    head = 1 / a + 4 * sign / (b * b + 4 * lam_arr**2)
    if t == 0:
        out = head
    else:
        if (1 - lam_arr.min() ** 2) * t > EXPONENT_GUARD:
            raise OverflowError("exp((1 - lambda^2) t) exceeds the guard")
        tail = -2 * sign * (t / lam_arr) * _xi_integral(b, t, lam_arr)
        out = np.exp(-a * t) * (head + tail)
    return out if out.ndim else float(out)


def q_tilde_ode_residual(lam: float, t: float, p: DimensionParams, m: float = 0.0, h: float = 1e-3) -> float:
    """``dQ~/dt + a Q~ - S~`` at one ``(lambda, t)``, with ``S~`` the transform of :func:`q_source`.

    The time derivative is a fourth-order central difference with step
    ``h * t``.  Returns the residual relative to ``|a Q~|``.
    """
    _require_odd(p)
    t = _check_t(t)
    lam = float(lam)
    dt = h * t
    vals = [q_tilde(lam, t + k * dt, p, m) for k in (-2, -1, 1, 2)]
    dq = (vals[0] - 8 * vals[1] + 8 * vals[2] - vals[3]) / (12 * dt)
    a = lam**2 + p.k**2 + m * m
    aq = a * q_tilde(lam, t, p, m)
    src = forward_radial(RadialFunction(lambda r: q_source(p, m, t, r)), p, lam)
    return float((dq + aq - src) / abs(aq))


# ---------------------------------------------------------------------------
# the Q component in space


def _xi_sinh_closed(t: float, r, m: float):
    """``int_0^1 exp(-t m^2 (1 - xi) - t (1 - xi)^2) sinh(r xi) dxi`` through erfcx.

    Loses relative accuracy like ``eps / r`` for small ``r``; used at large
    ``t`` only.
    """
    st = np.sqrt(t)

    def piece(beta):
        z0 = beta / (2 * st)
        return special.erfcx(z0) - np.exp(-(t + beta)) * special.erfcx(st + z0)

    tm2 = t * m * m
    return 0.5 * np.sqrt(np.pi / (4 * t)) * (np.exp(r) * piece(tm2 + r) - np.exp(-r) * piece(tm2 - r))


def _erfcx_odd_derivatives(x: float) -> tuple[float, float]:
    """First and third derivatives of ``erfcx`` at ``x > 0``.

    Large arguments use the asymptotic series differentiated termwise; the
    recurrence ``y' = 2 x y - 2/sqrt(pi)`` cancels badly there.
    """
    if x >= ERFCX_ASYMPTOTIC:
        y1 = y3 = 0.0
        c = 1.0
        for k in range(60):
            if k:
                c *= -(2 * k - 1) / 2
            q = 2 * k + 1
            t1 = c * -q * x ** (-q - 1)
            y1 += t1
            y3 += c * -q * (-q - 1) * (-q - 2) * x ** (-q - 3)
            if k > 3 and abs(t1) < 1e-17 * abs(y1):
                break
        return y1 / np.sqrt(np.pi), y3 / np.sqrt(np.pi)
    y = special.erfcx(x)
    y1 = 2 * x * y - 2 / np.sqrt(np.pi)
    y2 = 2 * y + 2 * x * y1
    return float(y1), float(4 * y1 + 2 * x * y2)


def _q3_radial_limit(t: float, m: float) -> float:
    """``Q''(0)`` of the three-dimensional closed form, from its Taylor series in ``r``.

    Writing ``sinh(r) Q = exp(-r^2/4t) (h1 r + h3 r^3 + ...)`` gives
    ``Q''(0) = 2 (h3 - h1/(4t) - h1/6)``.
    """
    a, c, st = 1 + m * m / 2, np.sqrt(1 + m * m), np.sqrt(t)
    pref_main = np.exp(-t * (1 + m * m)) / (8 * np.pi)
    pref_xi = 2 * np.sqrt(t / np.pi) / (4 * np.pi)
    span = min(1.0, 40 / st)

    def moment(poly):
        f = lambda u: poly(u) * np.exp(-t * u * u - t * m * m * u)  # noqa: E731
        return gauss_kronrod(f, 0.0, span, rtol=1e-14, atol=1e-300).value

    # xi and xi^3 - xi moments; the latter directly, since both xi moments
    # approach sqrt(pi/4t) at large t
    m1 = moment(lambda u: 1 - u)
    m31 = moment(lambda u: -u * (1 - u) * (2 - u))
    if m == 0:
        d1 = d3 = 0.0
    else:
        (ya1, ya3), (yc1, yc3) = _erfcx_odd_derivatives(st * a), _erfcx_odd_derivatives(st * c)
        d1, d3 = ya1 - yc1, ya3 - yc3
    main = pref_main * (d3 / (24 * t**1.5) - d1 / st * (1 / 6 + 1 / (4 * t)))
    xi_part = pref_xi * (m31 / 6 - m1 / (4 * t))
    return float(2 * (main + xi_part))


def _q3_closed(t: float, r, m: float):
    """Closed form of ``Q`` in three dimensions; ``r`` may be a Jet."""
    a = 1 + m * m / 2
    c = np.sqrt(1 + m * m)
    st = np.sqrt(t)
    half = r / (2 * st)
    gauss = np.exp(-(r * r) / (4 * t))
    bracket = (
        special.erfcx(st * a + half)
        - special.erfcx(st * a - half)
        - special.erfcx(st * c + half)
        + special.erfcx(st * c - half)
    )
    area = 4 * np.pi
    sh = np.sinh(r)
    main = np.exp(-t * (1 + m * m)) * gauss * bracket / (2 * area * sh)
    if t > XI_CLOSED_TIME:
        xi_int = _xi_sinh_closed(t, r, m)
    else:
        xi = 0.5 * (_GL_NODES + 1)
        w = 0.5 * _GL_WEIGHTS * np.exp(-t * m * m * (1 - xi) - t * (1 - xi) ** 2)
        if isinstance(r, Jet):
            terms = np.sinh(r * xi)
            xi_int = Jet(np.sum(w * terms.v), np.sum(w * terms.d1), np.sum(w * terms.d2))
        else:
            xi_int = np.sum(w * np.sinh(np.multiply.outer(np.asarray(r), xi)), axis=-1)
    last = np.sqrt(t / np.pi) * 2 * gauss / (area * sh) * xi_int
    return main + last


def q_inverse(t: float, r, p: DimensionParams, m: float = 0.0, method: str = "auto"):
    """``Q(t, r)`` for odd ``n``.

    Parameters
    ----------
    method
        ``"closed"`` (three dimensions only), ``"quadrature"`` (inverse
        radial transform of :func:`q_tilde`), or ``"auto"``.
    r
        Radius ``> 0``; a :class:`Jet` gives radial derivatives.
    """
    _require_odd(p)
    t = _check_t(t)
    if method == "auto":
        method = "closed" if p.n == 3 else "quadrature"
    if method == "closed":
        if p.n != 3:
            raise ValueError("the closed form exists for n = 3 only")
        if (isinstance(r, Jet) and r.v <= 0) or (not isinstance(r, Jet) and np.any(np.asarray(r) <= 0)):
            raise ValueError("closed form needs r > 0")
        return _q3_closed(t, r, m)
    if method != "quadrature":
        raise ValueError(f"unknown method {method!r}")
    _check_spectral_time(t)
    ft = lambda lam: q_tilde(lam, t, p, m)  # noqa: E731
    return inverse_radial(ft, p, r, decay=t)


def q_radial_limit(t: float, p: DimensionParams, m: float = 0.0, method: str = "auto") -> float:
    """``lim_{r->0} (1/sinh r) dQ/dr``.

    The closed route expands the three-dimensional closed form in ``r``.
    The quadrature route uses the exact limit
    ``Phi_lambda''(0) = -(lambda^2 + rho^2)/n`` under the integral.
    """
    _require_odd(p)
    t = _check_t(t)
    if method == "auto":
        method = "closed" if p.n == 3 else "quadrature"
    if method == "closed":
        if p.n != 3:
            raise ValueError("closed form exists for n = 3 only")
        return _q3_radial_limit(t, m)
    if method != "quadrature":
        raise ValueError(f"unknown method {method!r}")
    _check_spectral_time(t)
    rho2 = float(p.rho) ** 2

    def integrand(lam):
        return q_tilde(lam, t, p, m) * (-(lam * lam + rho2) / p.n) * plancherel_density(p, lam)

    lam_max = 1.0
    while np.exp(-t * lam_max**2) * lam_max ** (2 * p.k + 2) > 1e-18:
        lam_max *= 1.25
    res = gauss_kronrod(integrand, 0.0, lam_max, rtol=1e-12, atol=1e-300, initial=16)
    return float(inverse_prefactor(p) * res.value)


def u1_trace(p: DimensionParams, m: float, t: float, method: str = "auto") -> float:
    """Fibre trace ``-n lim_{r->0} [F(t, r) + (1/sinh r) dQ/dr]``."""
    _require_odd(p)
    f0 = f_component(p, m, t, 0.0)
    return float(-p.n * (f0 + q_radial_limit(t, p, m, method)))


def ghost_subtracted_partition_trace(p: DimensionParams, m: float, t: float, method: str = "auto") -> float:
    """U(1) trace minus two massless scalar ghost traces ``p_n(0, t)``."""
    scalar = float(odd_values(p.n, np.array([0.0]), _check_t(t))[0])
    return u1_trace(p, m, t, method) - 2 * scalar


@dataclass(frozen=True)
class BiTensorRadialKernel:
    """The two radial functions of the U(1) kernel for fixed dimension and mass."""

    p: DimensionParams
    mass: float = 0.0
    F: Callable = field(init=False, repr=False)
    Q: Callable = field(init=False, repr=False)

    def __post_init__(self):
        _require_odd(self.p)
        object.__setattr__(self, "F", lambda t, r: f_component(self.p, self.mass, t, r))
        object.__setattr__(self, "Q", lambda t, r: q_inverse(t, r, self.p, self.mass))

    def trace(self, t: float) -> float:
        return u1_trace(self.p, self.mass, t)


# ---------------------------------------------------------------------------
# bi-tensor identities in the half-space model


def _du_x(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    n = len(x)
    u = (x - y) @ (x - y) / (2 * x[-1] * y[-1])
    out = (x - y) / (x[-1] * y[-1])
    out[n - 1] -= u / x[-1]
    return out


def _du_y(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return _du_x(y, x)


def _ddu(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Mixed derivatives ``d^2 u / dx_mu dy_nu``."""
    n = len(x)
    xn, yn = x[-1], y[-1]
    out = -np.eye(n) / (xn * yn)
    out[:, n - 1] -= (x - y) / (xn * yn * yn)
    out[n - 1, :] -= _du_y(x, y) / xn
    return out


def _christoffel(x: np.ndarray) -> np.ndarray:
    """``Gamma[mu, nu, lam]`` of the metric ``delta / x_n^2``."""
    n = len(x)
    e = np.eye(n)
    en = e[n - 1]
    g = np.einsum("mv,l->mvl", e, en) + np.einsum("ml,v->mvl", e, en) - np.einsum("vl,m->mvl", e, en)
    return -g / x[-1]


# fourth-order stencil for mixed second derivatives, weights over 144 h^2
_CROSS_STENCIL = (
    (1, 1, 64), (-1, -1, 64), (1, -1, -64), (-1, 1, -64),
    (1, -2, 8), (2, -1, 8), (-2, 1, 8), (-1, 2, 8),
    (-1, -2, -8), (-2, -1, -8), (1, 2, -8), (2, 1, -8),
    (2, 2, 1), (-2, -2, 1), (2, -2, -1), (-2, 2, -1),
)


def _fd_derivatives(f: Callable[[np.ndarray], np.ndarray], x: np.ndarray):
    """First and second partial derivatives of an array-valued ``f`` by fourth-order differences."""
    n = len(x)
    h = 2e-3 * x[-1]
    f0 = f(x)
    d1 = np.empty((n,) + f0.shape)
    d2 = np.empty((n, n) + f0.shape)
    e = np.eye(n) * h
    for a in range(n):
        fm2, fm1, fp1, fp2 = (f(x + k * e[a]) for k in (-2, -1, 1, 2))
        d1[a] = (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * h)
        d2[a, a] = (-fm2 + 16 * fm1 - 30 * f0 + 16 * fp1 - fp2) / (12 * h * h)
        for b in range(a + 1, n):
            acc = 0.0
            for i, j, w in _CROSS_STENCIL:
                acc = acc + w * f(x + i * e[a] + j * e[b])
            d2[a, b] = d2[b, a] = acc / (144 * h * h)
    return f0, d1, d2


def _covariant(t0, d1, d2, x: np.ndarray):
    """``nabla_a T_m`` and ``box T_m`` for a 1-form ``T`` (extra indices inert)."""
    gam = _christoffel(x)
    dgam = np.zeros((len(x),) + gam.shape)
    dgam[-1] = -gam / x[-1]
    cov = d1 - np.einsum("gam,g...->am...", gam, t0)
    # derivative of cov: d_b cov_{a m}
    dcov = d2 - np.einsum("bgam,g...->bam...", dgam, t0) - np.einsum("gam,bg...->bam...", gam, d1)
    second = (
        dcov
        - np.einsum("gba,gm...->bam...", gam, cov)
        - np.einsum("gbm,ag...->bam...", gam, cov)
    )
    box = x[-1] ** 2 * np.einsum("aam...->m...", second)
    return cov, box


@dataclass(frozen=True)
class IdentityReport:
    """Maximum relative deviation of each checked identity."""

    deviations: dict
    coincidence: dict
    tol: float = IDENTITY_TOL

    @property
    def passed(self) -> bool:
        return all(v <= self.tol for v in self.deviations.values()) and all(
            v <= self.tol for v in self.coincidence_errors().values()
        )

    def coincidence_errors(self) -> dict:
        n = self.coincidence["n"]
        return {
            "trace_ddu": abs(self.coincidence["trace_ddu"] + n),
            "trace_du_du": abs(self.coincidence["trace_du_du"]),
        }


def bitensor_identity_check(p: DimensionParams, x: HalfSpacePoint, y: HalfSpacePoint) -> IdentityReport:
    """Check the bi-tensor identities used by the U(1) ansatz at ``(x, y)``.

    Verified, with ``A = d_mu d_nu' u`` and ``B = d_mu u d_nu' u``:

    * ``box A = A``;
    * ``(grad u) . grad B = 2 (1 + u) B``;
    * ``box B = (n + 1) B + 2 (1 + u) A``;
    * at ``x = y``: ``g^{mu nu'} A = -n`` and ``g^{mu nu'} B = 0``.
    """
    if x.n != p.n or y.n != p.n:
        raise ValueError("points must lie in the configured dimension")
    xa, ya = x.array, y.array
    if np.allclose(xa, ya):
        raise ValueError("off-coincidence identities need x != y")
    u = chordal_u(x, y)
    fa = lambda z: _ddu(z, ya)  # noqa: E731
    fb = lambda z: np.outer(_du_x(z, ya), _du_y(z, ya))  # noqa: E731
    a0, a1, a2 = _fd_derivatives(fa, xa)
    b0, b1, b2 = _fd_derivatives(fb, xa)
    _, box_a = _covariant(a0, a1, a2, xa)
    cov_b, box_b = _covariant(b0, b1, b2, xa)
    grad_u = xa[-1] ** 2 * _du_x(xa, ya)
    lhs2 = np.einsum("a,am...->m...", grad_u, cov_b)

    def rel(lhs, rhs):
        return float(np.max(np.abs(lhs - rhs)) / max(np.max(np.abs(rhs)), 1e-300))

    dev = {
        "box_ddu": rel(box_a, a0),
        "grad_u_dot_grad_dudu": rel(lhs2, 2 * (1 + u) * b0),
        "box_dudu": rel(box_b, (p.n + 1) * b0 + 2 * (1 + u) * a0),
    }
    xn = xa[-1]
    co = {
        "n": p.n,
        "trace_ddu": float(xn**2 * np.trace(_ddu(xa, xa))),
        "trace_du_du": float(xn**2 * _du_x(xa, xa) @ _du_y(xa, xa)),
        "u_at_coincidence": 0.0,
    }
    return IdentityReport(dev, co)
