"""Small-time (DeWitt) expansion of the heat kernel in exact rationals.

The kernel is written as ``(4 pi t)^{-n/2} exp(-r^2/4t) D^{1/2} Omega`` with
``D = (r / sinh r)^{n-1}`` and ``Omega = sum_l (-1)^l b_l(r) t^l / l!``.  The
radial functions ``b_l`` follow from the transport recursion
``(1 + (r/l) d/dr) b_l = N b_{l-1}`` with ``N = -D^{-1/2} Laplacian D^{1/2}``,
solved here order by order on :class:`~hypheat.series.RadialSeries`.

Coincidence values are reported as the coefficients ``b~_l`` defined by
``(4 pi t)^{n/2} exp(m^2 t) K(0, t) = sum_l b~_l t^l / l!`` for the scalar,
and ``sum_l b~_l t^l`` (no factorial) for the U(1) sector.  In the scalar
sector this gives ``b~_l = (-1)^l b_l(0)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .hypgeom import DimensionParams
from .jet import Jet
from .quadrature import gauss_kronrod
from .series import RadialSeries, r_coth_r, r_csch_r

#: Default truncation order ``J`` of the radial series.
DEFAULT_ORDER = 12
#: Slack allowed in the weighted Poincare inequality.
POINCARE_SLACK = 1e-9


class InequalityViolation(ArithmeticError):
    """Raised when a checked inequality fails beyond its slack."""


# ---------------------------------------------------------------------------
# curvature


@dataclass(frozen=True)
class CurvatureInvariants:
    """Curvature scalars of hyperbolic n-space.

    Signs follow the convention in which the Ricci tensor is
    ``+(n - 1) g``, so ``R = n(n - 1)`` is positive.
    """

    n: int
    R: Fraction
    Ric2: Fraction
    Riem2: Fraction
    sign_convention: str = "Ricci = +(n-1) g"

    @classmethod
    def of(cls, p: DimensionParams) -> "CurvatureInvariants":
        n = p.n
        return cls(n, Fraction(n * (n - 1)), Fraction(n * (n - 1) ** 2), Fraction(2 * n * (n - 1)))

    def scalar_b2(self) -> Fraction:
        """``(Riem2 - Ric2)/90 + R^2/36``: the scalar ``b~_2`` from invariants."""
        return (self.Riem2 - self.Ric2) / 90 + self.R**2 / 36

    def u1_trace_b2(self) -> Fraction:
        """Trace of the U(1) ``b~_2`` from invariants."""
        n = self.n
        return ((2 * n - 30) * self.Riem2 + (180 - 2 * n) * self.Ric2 + (5 * n - 60) * self.R**2) / 360


def scalar_b2_polynomial(n: int) -> Fraction:
    """``n^4/36 - n^3/15 + 13 n^2/180 - n/30``."""
    n = Fraction(n)
    return n**4 / 36 - n**3 / 15 + 13 * n**2 / 180 - n / 30


# ---------------------------------------------------------------------------
# the transport recursion


@lru_cache(maxsize=None)
def _half_density(n: int, order: int) -> tuple[RadialSeries, RadialSeries]:
    """``D^{1/2}`` and ``D^{-1/2}`` as exact series."""
    rho = Fraction(n - 1, 2)
    d_half = r_csch_r(order).power(rho)
    return d_half, d_half.reciprocal()


def nhat_apply(f: RadialSeries, p: DimensionParams) -> RadialSeries:
    """``-D^{-1/2} (d^2/dr^2 + (n - 1) coth r d/dr)(D^{1/2} f)`` on an even series.

    The result is trusted to two orders fewer than ``f``.
    """
    if not f.is_even:
        raise ValueError("the transport operator acts on even series")
    J = f.order
    d_half, d_mhalf = _half_density(p.n, J)
    g = d_half * f
    g1 = g.derivative()
    lap = g1.derivative() + (p.n - 1) * (r_coth_r(J) * g1.shift_down(1))
    return -(d_mhalf.truncate(lap.order) * lap)


def b_next(b_prev: RadialSeries, l: int, p: DimensionParams) -> RadialSeries:
    """Solve ``(1 + (r/l) d/dr) b_l = N b_{l-1}`` for the regular series ``b_l``.

    Coefficient ``j`` of the solution is ``l/(l + j)`` times coefficient
    ``j`` of the right-hand side.
    """
    if l < 1:
        raise ValueError("recursion index must be positive")
    rhs = nhat_apply(b_prev, p)
    return RadialSeries([Fraction(l, l + j) * c for j, c in enumerate(rhs.coeffs)], rhs.order)


def b_series(p: DimensionParams, count: int = 3, order: int = DEFAULT_ORDER) -> list[RadialSeries]:
    """``b_0 .. b_{count-1}`` as series; each step costs two orders."""
    if order - 2 * (count - 1) < 0:
        raise ValueError(f"order {order} is too small for {count} coefficients")
    out = [RadialSeries.constant(1, order)]
    for l in range(1, count):
        out.append(b_next(out[-1], l, p))
    return out


def b1_closed_form_series(p: DimensionParams, order: int = DEFAULT_ORDER) -> RadialSeries:
    """Series of ``(n-1)/4 [(n-3)(1/r^2 - coth(r)/r) + n - 1]``."""
    n = p.n
    x = r_coth_r(order + 2)
    bracket = (RadialSeries.constant(1, order + 2) - x).shift_down(2)
    return ((n - 3) * bracket + (n - 1)) * Fraction(n - 1, 4)


def b1_closed_form(p: DimensionParams, r: float) -> float:
    """Floating-point evaluation of the closed form of ``b_1(r)``, ``r > 0``."""
    n = p.n
    q = _coth_minus_inv(r)
    return float((n - 1) / 4 * ((n - 3) * (-q / r) + n - 1))


def scalar_coincidence(p: DimensionParams, order: int = DEFAULT_ORDER) -> tuple[Fraction, Fraction, Fraction]:
    """``(b~_0, b~_1, b~_2)`` of the scalar kernel at coincidence.

    ``b~_2`` is obtained twice, from the recursion and from the quartic
    polynomial in ``n``; a mismatch raises :class:`ArithmeticError`.
    """
    b = b_series(p, 3, order)
    b1 = -b[1][0]
    b2 = b[2][0]
    poly = scalar_b2_polynomial(p.n)
    if b2 != poly:
        raise ArithmeticError(f"recursion gives b2 = {b2}, polynomial gives {poly}")
    if b1 != -Fraction(p.n * (p.n - 1), 6):
        raise ArithmeticError(f"recursion gives b1 = {b1}")
    return Fraction(1), b1, b2


def u1_coincidence(p: DimensionParams) -> tuple[Fraction, Fraction, Fraction]:
    """Scalar factors multiplying ``g_{mu nu'}`` in the U(1) ``b~_0, b~_1, b~_2``.

    Multiply by ``n`` for the traces.
    """
    n = Fraction(p.n)
    R = CurvatureInvariants.of(p).R
    b1 = (1 / n) * (1 - n / 6) * R
    b2 = n**4 / 72 - n**3 / 5 + 313 * n**2 / 360 - 27 * n / 20 + Fraction(2, 3)
    return Fraction(1), b1, b2


def u1_traces(p: DimensionParams) -> tuple[Fraction, Fraction, Fraction]:
    """Traces ``n * u1_coincidence``."""
    return tuple(p.n * c for c in u1_coincidence(p))


def ghost_subtracted_traces(p: DimensionParams) -> tuple[Fraction, Fraction, Fraction]:
    """U(1) traces minus two massless scalar ghosts, from curvature invariants."""
    n = p.n
    c = CurvatureInvariants.of(p)
    t0 = Fraction(n - 2)
    t1 = (8 - n) * c.R / 6
    t2 = ((n - 17) * c.Riem2 + (92 - n) * c.Ric2) / 180 + (n - 14) * c.R**2 / 72
    return t0, t1, t2


# ---------------------------------------------------------------------------
# the weight function and the Poincare inequality


def _coth_minus_inv(r):
    """``coth r - 1/r``, accurate for small ``r``."""
    r = np.asarray(r, dtype=float)
    small = np.abs(r) < 0.1
    rs = np.where(small, r, 0.1)
    r2 = rs * rs
    series = rs * (1 / 3 - r2 * (1 / 45 - r2 * (2 / 945 - r2 / 4725)))
    rb = np.where(small, 1.0, r)
    direct = 1 / np.tanh(rb) - 1 / rb
    out = np.where(small, series, direct)
    return out if out.ndim else float(out)


def phi_weight(p: DimensionParams, r) -> float:
    """``-D^{-1/2} Laplacian D^{1/2}`` as a function of ``r > 0``.

    Evaluated as ``(n-1)/4 [(n-3) q (q + 2/r) + 2]`` with ``q = coth r - 1/r``,
    which has no cancellation at small ``r``.
    """
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr <= 0):
        raise ValueError("the weight is defined for r > 0")
    n = p.n
    q = np.asarray(_coth_minus_inv(r_arr))
    out = (n - 1) / 4 * ((n - 3) * q * (q + 2 / r_arr) + 2)
    return out if out.ndim else float(out)


def phi_weight_limits(p: DimensionParams) -> tuple[Fraction, Fraction]:
    """Values of the weight at ``r -> 0`` and ``r -> infinity``."""
    n = p.n
    return Fraction(n * (n - 1), 6), Fraction((n - 1) ** 2, 4)


def _derivative(f, r: np.ndarray) -> np.ndarray:
    try:
        j = f(Jet(r, np.ones_like(r), np.zeros_like(r)))
        if isinstance(j, Jet):
            return np.asarray(j.d1, dtype=float) * np.ones_like(r)
    except (TypeError, AttributeError, ValueError):
        pass
    h = 1e-4
    return (f(r - 2 * h) - 8 * f(r - h) + 8 * f(r + h) - f(r + 2 * h)) / (12 * h)


def poincare_check(f, p: DimensionParams, support: float | None = None, rtol: float = 1e-12):
    """Both sides of ``int |f'|^2 dmu >= int Phi f^2 dmu``, ``dmu = sinh^{n-1} r dr``.

    Parameters
    ----------
    f
        Vectorized radial function, or a :class:`~hypheat.fourier.RadialFunction`
        with compact support.
    support
        Radius ``R`` with ``f = 0`` beyond it; taken from ``f`` if omitted.

    Raises
    ------
    InequalityViolation
        If ``lhs < rhs - 1e-9``.
    """
    R = support if support is not None else getattr(f, "support", None)
    if R is None or R <= 0:
        raise ValueError("a positive support radius is required")
    n = p.n

    def lhs_integrand(r):
        return _derivative(f, r) ** 2 * np.sinh(r) ** (n - 1)

    def rhs_integrand(r):
        return phi_weight(p, r) * np.asarray(f(r), dtype=float) ** 2 * np.sinh(r) ** (n - 1)

    # Gauss-Kronrod nodes are interior, so r = 0 is never evaluated
    lhs = gauss_kronrod(lhs_integrand, 0.0, R, rtol=rtol, atol=1e-300).value
    rhs = gauss_kronrod(rhs_integrand, 0.0, R, rtol=rtol, atol=1e-300).value
    if lhs < rhs - POINCARE_SLACK:
        raise InequalityViolation(f"weighted Poincare inequality fails: {lhs!r} < {rhs!r}")
    return float(lhs), float(rhs)
