"""Heat kernels ``p_n(r, t)`` of ``d/dt - Laplacian`` on hyperbolic n-space.

Odd dimensions ``n = 2k + 1`` are exact: ``p_n`` is ``(1/sinh r d/dr)^k``
applied to the one-dimensional Gaussian, kept symbolically as a
:class:`~hypheat.terms.GaussianTermExpr`.  Even dimensions ``n = 2k + 2``
apply the same operator under the integral sign of the two-dimensional
kernel, so each evaluation is one smooth one-dimensional quadrature.

All kernels here are massless; :func:`massive` multiplies by ``exp(-m^2 t)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .hypgeom import DimensionParams
from .quadrature import gauss_kronrod
from .terms import GaussianTermExpr

#: Integration stops where the Gaussian factor has dropped below this
#: fraction of its value at the lower endpoint.
GAUSSIAN_TAIL = 1e-18
#: Relative accuracy requested from the even-dimensional quadratures.
QUAD_RTOL = 1e-13
#: Largest odd dimension whose term list is built on demand.
MAX_ODD_DIMENSION = 13


class Method(str, enum.Enum):
    CLOSED_FORM = "closed_form"
    QUADRATURE = "quadrature"
    RECURRENCE = "recurrence"
    SPECTRAL = "spectral"
    DESCENT = "descent"


@dataclass(frozen=True)
class KernelValue:
    """A kernel evaluation together with the point and the evaluation route."""

    value: float
    n: int
    r: float
    t: float
    mass: float = 0.0
    method: Method = Method.CLOSED_FORM

    def __post_init__(self):
        if not np.isfinite(self.value):
            raise FloatingPointError(f"non-finite kernel value at n={self.n}, r={self.r}, t={self.t}")
        if not self.t > 0:
            raise ValueError("time must be positive")

    def __float__(self) -> float:
        return float(self.value)


def _check_t(t: float) -> float:
    t = float(t)
    if not (t > 0 and np.isfinite(t)):
        raise ValueError(f"time must be positive and finite, got {t}")
    return t


# ---------------------------------------------------------------------------
# term lists


@lru_cache(maxsize=None)
def odd_expression(n: int) -> GaussianTermExpr:
    """``(1/sinh r d/dr)^k exp(-r^2/4t)`` for ``n = 2k + 1``."""
    if n % 2 != 1 or n < 1:
        raise ValueError("odd dimension expected")
    if n > MAX_ODD_DIMENSION:
        raise ValueError(f"odd dimensions above {MAX_ODD_DIMENSION} are not enabled")
    if n == 1:
        return GaussianTermExpr.unit()
    return odd_expression(n - 2).recurrence_step()


@lru_cache(maxsize=None)
def even_expression(n: int) -> GaussianTermExpr:
    """``(1/sinh s d/ds)^k [s csch s exp(-s^2/4t)]`` for ``n = 2k + 2``."""
    if n % 2 != 0 or n < 2:
        raise ValueError("even dimension expected")
    if n == 2:
        return GaussianTermExpr({(1, 0, 1, 0): 1})
    return even_expression(n - 2).recurrence_step()


def odd_prefactor(n: int, t: float, shift: float = 0.0) -> float:
    """``(-1)^k (2 pi)^-k exp(shift - k^2 t) (4 pi t)^(-1/2)`` for ``n = 2k + 1``.

    ``shift`` lets callers fold an extra exponential into the prefactor
    without the intermediate underflowing at large ``t``.
    """
    k = (n - 1) // 2
    return (-1) ** k / (2 * np.pi) ** k * np.exp(shift - k * k * t) / np.sqrt(4 * np.pi * t)


def even_prefactor(n: int, t: float) -> float:
    """Constant in front of the even-dimensional integral, ``n = 2k + 2``."""
    k = (n - 2) // 2
    return (
        (-1) ** k
        / (2 * np.pi) ** k
        * np.exp(-(k * (k + 1) + 0.25) * t)
        * np.sqrt(2.0)
        / (4 * np.pi * t) ** 1.5
    )


def odd_values(n: int, r, t: float, shift: float = 0.0) -> np.ndarray:
    """Vectorized odd-dimensional kernel (massless), times ``exp(shift)``."""
    t = _check_t(t)
    return odd_prefactor(n, t, shift) * odd_expression(n).evaluate(r, t)


# ---------------------------------------------------------------------------
# the smooth v-integral shared by the even kernels and the descent relation


def _upper_w(r: float, t: float) -> float:
    tail = -np.log(GAUSSIAN_TAIL)
    s_max = np.sqrt(r * r + 4 * t * tail)
    v2 = 2 * (np.sinh(s_max / 2) ** 2 - np.sinh(r / 2) ** 2)
    return float(np.arcsinh(np.sqrt(v2)))


def _s_of_w(r: float, w: np.ndarray) -> np.ndarray:
    # cosh s = cosh r + sinh(w)^2, written to stay accurate for small s
    return 2 * np.arcsinh(np.sqrt(np.sinh(r / 2) ** 2 + 0.5 * np.sinh(w) ** 2))


def gaussian_v_integral(
    h, r: float, t: float, rtol: float = QUAD_RTOL, with_gaussian: bool = True
) -> float:
    """``int_0^inf 2 h(s) exp(-(s^2 - r^2)/4t) dv`` with ``cosh s = cosh r + v^2``.

    ``h`` is a vectorized function of ``s``.  The substitution ``v = sinh w``
    keeps the integrand smooth and spreads the Gaussian tail evenly.  With
    ``with_gaussian=False`` the exponential is omitted and ``h`` must carry
    its own decay (the truncation point is still set by the Gaussian).
    """
    r = abs(float(r))
    w_max = _upper_w(r, t)

    def integrand(w):
        s = _s_of_w(r, w)
        out = 2 * h(s) * np.cosh(w)
        if with_gaussian:
            out = out * np.exp(-(s - r) * (s + r) / (4 * t))
        return out

    return float(gauss_kronrod(integrand, 0.0, w_max, rtol=rtol, initial=6).value)


# ---------------------------------------------------------------------------
# public kernels


def p1(r: float, t: float) -> KernelValue:
    """One-dimensional heat kernel ``(4 pi t)^(-1/2) exp(-r^2/4t)``."""
    t = _check_t(t)
    val = np.exp(-r * r / (4 * t)) / np.sqrt(4 * np.pi * t)
    return KernelValue(float(val), 1, float(r), t)


def p_odd(p: DimensionParams, r: float, t: float) -> KernelValue:
    """Closed-form kernel in odd dimension ``n >= 3`` (massless)."""
    if not p.is_odd:
        raise ValueError("p_odd needs an odd dimension")
    t = _check_t(t)
    val = odd_values(p.n, np.array([abs(r)]), t)[0]
    return KernelValue(float(val), p.n, float(r), t, 0.0, Method.CLOSED_FORM)


def p_even(p: DimensionParams, r: float, t: float, rtol: float = QUAD_RTOL) -> KernelValue:
    """Even-dimensional kernel by one smooth quadrature (massless)."""
    if p.is_odd:
        raise ValueError("p_even needs an even dimension")
    t = _check_t(t)
    r = abs(float(r))
    expr = even_expression(p.n)
    integral = gaussian_v_integral(lambda s: expr.prefactor(s, t), r, t, rtol)
    val = even_prefactor(p.n, t) * integral * np.exp(-r * r / (4 * t))
    return KernelValue(float(val), p.n, r, t, 0.0, Method.QUADRATURE)


def p2(r: float, t: float) -> KernelValue:
    """Two-dimensional kernel."""
    return p_even(DimensionParams(2), r, t)


def heat_kernel(p: DimensionParams, r: float, t: float) -> KernelValue:
    """Kernel in any dimension ``n >= 2`` including the mass ``p.mass``."""
    base = p_odd(p, r, t) if p.is_odd else p_even(p, r, t)
    return massive(base, p.mass)


def massive(v: KernelValue, m: float) -> KernelValue:
    """Attach a field mass: multiply by ``exp(-m^2 t)``."""
    if m < 0:
        raise ValueError("mass must be nonnegative")
    return replace(v, value=v.value * float(np.exp(-m * m * v.t)), mass=float(m))


def _kernel_values(n: int, s: np.ndarray, t: float) -> np.ndarray:
    if n % 2 == 1:
        return odd_values(n, s, t)
    p = DimensionParams(n)
    return np.array([p_even(p, si, t).value for si in np.ravel(s)])


def descend(p: DimensionParams, r: float, t: float) -> KernelValue:
    """Kernel in dimension ``p.n - 1`` from the kernel in dimension ``p.n``.

    Integrates ``sqrt(2) exp((2n+1)t/4) int_r^inf K_{n+2}(s) sinh s ds /
    sqrt(cosh s - cosh r)`` with ``n + 2 = p.n``.
    """
    t = _check_t(t)
    if p.n < 3:
        raise ValueError("descent needs a source dimension of at least 3")
    r = abs(float(r))
    n = p.n - 2
    integral = gaussian_v_integral(
        lambda s: _kernel_values(p.n, s, t), r, t, with_gaussian=False
    )
    val = np.sqrt(2.0) * np.exp((2 * n + 1) * t / 4) * integral
    return KernelValue(float(val), n + 1, r, t, 0.0, Method.DESCENT)


def spectral_kernel(p: DimensionParams, r: float, t: float) -> KernelValue:
    """Odd-dimensional kernel from its spectral representation."""
    from .fourier import inverse_radial

    t = _check_t(t)
    rho2 = float(p.rho) ** 2
    val = inverse_radial(lambda lam: np.exp(-(lam * lam + rho2) * t), p, r, decay=t)
    return KernelValue(float(val), p.n, float(r), t, 0.0, Method.SPECTRAL)


# ---------------------------------------------------------------------------
# heat-equation residuals


def heat_residual(p: DimensionParams, r: float, t: float, step: float = 2e-3) -> float:
    """Relative residual of ``d_t p = p'' + (n - 1) coth(r) p'`` at ``(r, t)``.

    Odd dimensions differentiate the term list exactly; even dimensions use
    fourth-order central differences with spacing ``step``.
    """
    t = _check_t(t)
    if r <= 0:
        raise ValueError("residual is evaluated at r > 0")
    n = p.n
    if p.is_odd:
        e = odd_expression(n)
        k = p.k
        pref = odd_prefactor(n, t)
        val = e.evaluate(r, t)[0]
        dt = pref * (e.diff_t().evaluate(r, t)[0] + (-k * k - 0.5 / t) * val)
        d1 = pref * e.diff_r().evaluate(r, t)[0]
        d2 = pref * e.diff_r().diff_r().evaluate(r, t)[0]
    else:
        h = step

        def f(rr, tt):
            return p_even(p, rr, tt).value

        fr = [f(r + i * h, t) for i in (-2, -1, 0, 1, 2)]
        ft = [f(r, t + i * h) for i in (-2, -1, 1, 2)]
        d1 = (fr[0] - 8 * fr[1] + 8 * fr[3] - fr[4]) / (12 * h)
        d2 = (-fr[0] + 16 * fr[1] - 30 * fr[2] + 16 * fr[3] - fr[4]) / (12 * h * h)
        dt = (ft[0] - 8 * ft[1] + 8 * ft[2] - ft[3]) / (12 * h)
    lap1 = (n - 1) / np.tanh(r) * d1
    scale = abs(dt) + abs(d2) + abs(lap1)
    return float(abs(dt - d2 - lap1) / scale)


def a_coefficients(n: int) -> tuple[Fraction, ...]:
    """Exact ``a_{k,l}``, ``l = 0..k-1``, of the odd-dimensional diagonal.

    Defined by ``(4 pi t)^{n/2} exp(k^2 t) p_n(0, t) = sum_l a_{k,l} t^l``.
    """
    k = (n - 1) // 2
    lim = odd_expression(n).limit_at_zero()
    out = []
    for l in range(k):
        out.append((-2) ** k * lim.get(k - l, Fraction(0)))
    if any(v != 0 and not 1 <= d <= k for d, v in lim.items()):
        raise ArithmeticError("unexpected power of t in the diagonal value")
    return tuple(out)
