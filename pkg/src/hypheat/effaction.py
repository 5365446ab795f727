"""Cutoff-regularized one-loop effective actions per unit volume.

With a proper-time cutoff ``epsilon = Lambda^-2`` the action density is
``w(Lambda) = 1/2 int_epsilon^inf dt/t K(t)`` where ``K`` is the diagonal
heat kernel (or a fibre trace) including the mass.  Each decomposition
splits ``w`` into a divergent density, built from the small-time terms that
are not integrable at ``t = 0`` and integrated exactly, and a regular
density.  The regular density depends only weakly on ``Lambda`` and tends to
``regular_limit`` as ``Lambda -> infinity``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import special

from .asymptotics import even_coincidence_series, extract_a_coeffs
from .heatkernel import odd_values, p_even
from .hypgeom import DimensionParams
from .quadrature import ConvergenceError, gauss_kronrod, integrate_to_infinity

CUTOFF_CONVENTION = "lower proper-time cutoff epsilon = Lambda**-2"
#: Largest tolerated error amplification in the incomplete-gamma recursion.
RECURSION_CONDITION_LIMIT = 1e-9
#: Below this time the even-dimensional kernels are replaced by their series.
EVEN_SERIES_TIME = 0.02
EVEN_SERIES_TERMS = 10
#: Upper time limit is set where ``exp(-b^2 t)`` falls below ``exp(-TAIL_EXPONENT)``.
TAIL_EXPONENT = 60.0
ACTION_RTOL = 1e-13


class IRDivergenceError(ConvergenceError):
    """The trace does not decay fast enough for ``int dt/t`` to converge at large ``t``."""


@dataclass(frozen=True)
class ActionDecomposition:
    """Split of the regularized action density at cutoff ``Lambda``.

    Attributes
    ----------
    divergent
        Sum of the exactly integrated non-integrable small-time terms.
    regular
        Remainder at this cutoff.
    regular_limit
        ``Lambda -> infinity`` value of ``regular`` when known in closed form
        or computed separately, else ``None``.
    series_estimate, truncation_index
        For even dimensions: termwise asymptotic estimate of the regular
        limit and the number of terms kept.
    """

    n: int
    mass: float
    cutoff: float
    divergent: float
    regular: float
    regular_limit: float | None = None
    series_estimate: float | None = None
    truncation_index: int | None = None
    cutoff_convention: str = CUTOFF_CONVENTION

    @property
    def total(self) -> float:
        return self.divergent + self.regular


def _check_cutoff(cutoff: float) -> float:
    cutoff = float(cutoff)
    if not (cutoff > 0 and np.isfinite(cutoff)):
        raise ValueError(f"cutoff must be positive and finite, got {cutoff}")
    return cutoff


# ---------------------------------------------------------------------------
# special functions


def erf_erfc(x) -> tuple:
    """``(erf(x), erfc(x))``; ``erfc`` is computed directly, not as ``1 - erf``."""
    return special.erf(x), special.erfc(x)


def _upper_gamma_quad(a: float, x: float) -> float:
    return integrate_to_infinity(
        lambda u: u ** (a - 1) * np.exp(-u), x, scale=max(x, 1.0), rtol=1e-13, atol=1e-300
    )


def _half_gamma_pieces(s: int, x: float) -> tuple[float, float, float]:
    """Recursion for ``Gamma(1/2 - s, x)``.

    Returns ``(exp_part, erfc_part, condition)`` where ``exp_part`` collects
    the ``x^a exp(-x)`` terms, ``erfc_part = Gamma(1/2 - s) erfc(sqrt x)``,
    and ``condition`` estimates the relative roundoff amplification.
    """
    a = 0.5
    exp_part = 0.0
    erfc_part = np.sqrt(np.pi) * special.erfc(np.sqrt(x))
    magnitude = erfc_part
    ex = np.exp(-x)
    for _ in range(s):
        a -= 1.0
        term = x**a * ex
        exp_part = (exp_part - term) / a
        erfc_part = erfc_part / a
        magnitude = (magnitude + abs(term)) / abs(a)
    total = exp_part + erfc_part
    cond = np.finfo(float).eps * magnitude / abs(total) if total else np.inf
    return exp_part, erfc_part, cond


def upper_gamma_half(s: int, x: float) -> float:
    """``int_x^inf u^{-(s + 1/2)} exp(-u) du`` for integer ``s >= 1`` and ``x > 0``.

    Evaluated by downward recursion from ``sqrt(pi) erfc(sqrt x)``; falls
    back to adaptive quadrature when the recursion loses too many digits.
    """
    if int(s) != s or s < 1:
        raise ValueError("s must be a positive integer")
    if not x > 0:
        raise ValueError("x must be positive")
    e, c, cond = _half_gamma_pieces(int(s), float(x))
    if cond > RECURSION_CONDITION_LIMIT:
        return _upper_gamma_quad(0.5 - s, x)
    return float(e + c)


def upper_gamma_int(a: int, x: float) -> float:
    """``Gamma(a, x)`` for integer ``a <= 0`` by recursion from ``E_1``; ``a >= 1`` via scipy."""
    if a >= 1:
        return float(special.gammaincc(a, x) * special.gamma(a))
    g = special.exp1(x)
    ex = np.exp(-x)
    for b in range(-1, a - 1, -1):
        g = (g - x**b * ex) / b
    return float(g)


# ---------------------------------------------------------------------------
# odd dimensions


def _odd_b2(p: DimensionParams, m: float) -> float:
    return p.k**2 + m * m


def w_odd_regular_density(p: DimensionParams, m: float) -> float:
    """``Lambda -> infinity`` regular density for odd ``n = 2k + 1``."""
    if not p.is_odd:
        raise ValueError("odd dimension expected")
    k = p.k
    b2 = _odd_b2(p, m)
    a = extract_a_coeffs(k).coeffs
    s = sum((-1) ** l * float(a[l]) / (special.gamma(k - l + 1.5) * b2**l) for l in range(k))
    return float((-1) ** (k + 1) / (2 ** (2 * (k + 1)) * np.pi ** (k - 0.5)) * b2 ** (k + 0.5) * s)


def w_odd_decomposition(p: DimensionParams, m: float, cutoff: float) -> ActionDecomposition:
    """Exact split for odd ``n``: the ``exp(-x)`` recursion terms are divergent, the ``erfc`` terms regular."""
    if not p.is_odd:
        raise ValueError("odd dimension expected")
    cutoff = _check_cutoff(cutoff)
    k = p.k
    b2 = _odd_b2(p, m)
    b = np.sqrt(b2)
    x = b2 / cutoff**2
    a = extract_a_coeffs(k).coeffs
    pref = b ** (2 * k + 1) / (2 * (4 * np.pi) ** (k + 0.5))
    div = reg = 0.0
    for l in range(k):
        e, c, cond = _half_gamma_pieces(k - l + 1, x)
        if cond > RECURSION_CONDITION_LIMIT:
            # recursion unusable: keep the erfc piece exact and take the rest by quadrature
            e = _upper_gamma_quad(l - k - 0.5, x) - c
        div += float(a[l]) / b2**l * e
        reg += float(a[l]) / b2**l * c
    return ActionDecomposition(
        p.n, float(m), cutoff, float(pref * div), float(pref * reg), w_odd_regular_density(p, m)
    )


def w_h3_decomposition(m: float, cutoff: float) -> ActionDecomposition:
    """Three-dimensional split written out in closed form."""
    cutoff = _check_cutoff(cutoff)
    b2 = 1 + m * m
    b = np.sqrt(b2)
    y = cutoff / b
    div = b2**1.5 / (3 * (4 * np.pi) ** 1.5) * (y**3 - 2 * y) * np.exp(-1 / (y * y))
    reg = b2**1.5 / (12 * np.pi) * special.erfc(b / cutoff)
    return ActionDecomposition(3, float(m), cutoff, float(div), float(reg), float(b2**1.5 / (12 * np.pi)))


# ---------------------------------------------------------------------------
# generic cutoff integral


def _log_time_integral(
    f: Callable[[np.ndarray], np.ndarray], t_lo: float, t_hi: float, rtol: float, atol: float = 1e-300
) -> float:
    """``int_{t_lo}^{t_hi} f(t) dt/t`` on a logarithmic time axis.

    ``atol`` matters when ``f`` is a small difference of large terms: the
    relative target alone would then chase the roundoff of those terms.
    """
    if t_hi <= t_lo:
        return 0.0
    span = np.log(t_hi / t_lo)
    panels = int(np.clip(np.ceil(span), 4, 60))

    def g(y):
        return f(t_lo * np.exp(y))

    return float(gauss_kronrod(g, 0.0, span, rtol=rtol, atol=atol, initial=panels).value)


def _diagonal(p: DimensionParams, m: float) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorized massive diagonal kernel ``K(0, t)``."""
    if p.is_odd:

        def k_odd(t):
            t = np.atleast_1d(t)
            return np.array([odd_values(p.n, np.array([0.0]), ti)[0] for ti in t]) * np.exp(-m * m * t)

        return k_odd

    def k_even(t):
        t = np.atleast_1d(t)
        return np.array([p_even(p, 0.0, ti).value for ti in t]) * np.exp(-m * m * t)

    return k_even


def direct_action_density(p: DimensionParams, m: float, cutoff: float, rtol: float = ACTION_RTOL) -> float:
    """``1/2 int_{Lambda^-2}^inf dt/t K(0, t)`` by quadrature of the kernel itself."""
    cutoff = _check_cutoff(cutoff)
    b2 = float(p.rho) ** 2 + m * m
    return 0.5 * _log_time_integral(_diagonal(p, m), cutoff**-2, TAIL_EXPONENT / b2, rtol)


# ---------------------------------------------------------------------------
# even dimensions


def w_even_decomposition(p: DimensionParams, m: float, cutoff: float, L: int = EVEN_SERIES_TERMS) -> ActionDecomposition:
    """Split for even ``n``.

    Terms ``t^l`` with ``l <= n/2`` of the small-time series are integrated
    exactly (incomplete gamma functions of nonpositive integer order) and
    form the divergent density.  The regular density is the cutoff integral
    of the kernel minus those terms: the series supplies the integrand below
    :data:`EVEN_SERIES_TIME` and the quadrature kernel above it.
    """
    if p.is_odd:
        raise ValueError("even dimension expected")
    cutoff = _check_cutoff(cutoff)
    n = p.n
    half = n // 2
    b2 = float(p.rho) ** 2 + m * m
    c = [float(v) for v in even_coincidence_series(n, L).coeffs]
    x = b2 / cutoff**2
    four_pi = (4 * np.pi) ** (-n / 2)
    div = 0.5 * four_pi * sum(c[l] * b2 ** (half - l) * upper_gamma_int(l - half, x) for l in range(half + 1))

    def subtracted(t):
        return four_pi * t ** (-half) * np.exp(-b2 * t) * sum(c[l] * t**l for l in range(half + 1))

    def series_rest(t):
        return four_pi * t ** (-half) * np.exp(-b2 * t) * sum(c[l] * t**l for l in range(half + 1, L + 1))

    def remainder(t):
        return kernel(t) - subtracted(t)

    kernel = _diagonal(p, m)
    eps = cutoff**-2
    t_hi = TAIL_EXPONENT / b2
    t_mid = EVEN_SERIES_TIME
    # absolute target tied to the size of the cancelling terms
    atol = ACTION_RTOL * float(subtracted(max(eps, t_mid)))
    high = _log_time_integral(remainder, t_mid, t_hi, ACTION_RTOL, atol)
    if eps < t_mid:
        reg = 0.5 * (_log_time_integral(series_rest, eps, t_mid, ACTION_RTOL) + high)
    else:
        reg = 0.5 * _log_time_integral(remainder, eps, t_hi, ACTION_RTOL, atol)
    # the series remainder is integrable down to t = 0
    low_limit = 0.5 * sum(
        c[l] * four_pi * b2 ** (half - l) * float(special.gammainc(l - half, b2 * t_mid) * special.gamma(l - half))
        for l in range(half + 1, L + 1)
    )
    limit = low_limit + 0.5 * high
    est, idx = _series_estimate(c, half, b2, four_pi)
    return ActionDecomposition(n, float(m), cutoff, float(div), float(reg), limit, est, idx)


def _series_estimate(c: Sequence[float], half: int, b2: float, four_pi: float) -> tuple[float, int]:
    """Termwise complete-gamma estimate of the regular limit, optimally truncated."""
    terms = [0.5 * four_pi * c[l] * b2 ** (half - l) * special.gamma(l - half) for l in range(half + 1, len(c))]
    if not terms:
        return 0.0, 0
    mags = np.abs(terms)
    stop = len(terms)
    for i in range(1, len(terms)):
        if mags[i] > mags[i - 1]:
            stop = i
            break
    return float(np.sum(terms[:stop])), half + stop


def w_h2_decomposition(m: float, cutoff: float, L: int = EVEN_SERIES_TERMS) -> ActionDecomposition:
    return w_even_decomposition(DimensionParams(2, m), m, cutoff, L)


def w_h4_decomposition(m: float, cutoff: float, L: int = EVEN_SERIES_TERMS) -> ActionDecomposition:
    return w_even_decomposition(DimensionParams(4, m), m, cutoff, L)


def h2_divergent_closed_form(m: float, cutoff: float) -> float:
    """Large-cutoff form of the two-dimensional divergent density.

    ``1/(8 pi) [(Lambda^2 - 2 b^2 ln(Lambda/b)) exp(-(b/Lambda)^2) + b^2 gamma]``
    plus the ``t``-coefficient contribution, with ``b^2 = m^2 + 1/4``; exact
    up to ``O(Lambda^-2)``.
    """
    b2 = 0.25 + m * m
    lam2 = cutoff * cutoff
    c1 = float(even_coincidence_series(2, 1).coeffs[1])
    lead = (lam2 - 2 * b2 * np.log(cutoff / np.sqrt(b2))) * np.exp(-b2 / lam2) + b2 * np.euler_gamma
    log_part = c1 * (2 * np.log(cutoff / np.sqrt(b2)) - np.euler_gamma)
    return float((lead + log_part) / (8 * np.pi))


# ---------------------------------------------------------------------------
# from an arbitrary trace


def _large_t_exponent(trace: Callable[[float], float], t: float) -> float:
    """Local power ``beta`` with ``trace ~ t^{-beta}`` estimated at ``t``."""
    f1, f2 = abs(trace(t)), abs(trace(4 * t))
    if f1 == 0:
        return np.inf
    if f2 == 0:
        return np.inf
    return float(-np.log(f2 / f1) / np.log(4.0))


def w_from_trace(
    trace: Callable[[float], float],
    cutoff: float,
    subtraction: Sequence[tuple[float, float]] = (),
    n: int = 0,
    mass: float = 0.0,
    t_split: float = 1.0,
    t_max: float = 1e6,
) -> ActionDecomposition:
    """Regularized density ``1/2 int_{Lambda^-2}^inf dt/t trace(t)``.

    Parameters
    ----------
    trace
        Scalar function of ``t > 0``.
    subtraction
        Declared small-time monomials ``(power, coeff)``, meaning
        ``trace(t) ~ sum coeff t^power``; those with ``power <= 0`` are
        integrated analytically on ``[epsilon, t_split]`` and reported as the
        divergent density.
    t_split
        End of the subtraction window.
    t_max
        Point where the large-time tail is probed and the integral is cut;
        the remaining tail is estimated from the probed power law.

    Raises
    ------
    IRDivergenceError
        If the trace decays no faster than ``1/t^0`` at large ``t``.
    ValueError
        If the subtracted trace still diverges at small ``t``.
    """
    cutoff = _check_cutoff(cutoff)
    eps = cutoff**-2
    subs = [(float(pw), float(cf)) for pw, cf in subtraction]
    for pw, _ in subs:
        if pw > 0:
            raise ValueError("only non-integrable monomials (power <= 0) may be subtracted")

    def sub(t):
        return sum(cf * t**pw for pw, cf in subs)

    def scalar(f):
        return lambda t: np.array([f(float(ti)) for ti in np.atleast_1d(t)])

    # small-time consistency: the remainder must vanish as t -> 0
    probe = min(eps, 1e-3) / 4
    r1, r2 = trace(probe) - sub(probe), trace(4 * probe) - sub(4 * probe)
    scale1 = abs(trace(probe)) + sum(abs(cf * probe**pw) for pw, cf in subs)
    if abs(r1) > 1e-12 * scale1 and abs(r1) >= abs(r2):
        raise ValueError("declared subtraction does not match the detected small-time divergence")

    beta = _large_t_exponent(trace, t_max / 4)
    if beta <= 0.05:
        raise IRDivergenceError(f"trace behaves like t**({-beta:.3g}) at large t; the action integral diverges")

    div = 0.0
    t_hi_sub = max(t_split, eps)
    for pw, cf in subs:
        if pw == 0:
            div += cf * np.log(t_hi_sub / eps)
        else:
            div += cf * (t_hi_sub**pw - eps**pw) / pw
    div *= 0.5

    # absolute target tied to the size of the cancelling terms at the cutoff
    atol = 1e-13 * (abs(trace(eps)) + sum(abs(cf * eps**pw) for pw, cf in subs))
    low = _log_time_integral(scalar(lambda t: trace(t) - sub(t)), eps, t_hi_sub, 1e-12, atol)
    high = _log_time_integral(scalar(trace), t_hi_sub, t_max, 1e-12)
    tail = trace(t_max) / beta if np.isfinite(beta) else 0.0
    reg = 0.5 * (low + high + tail)
    return ActionDecomposition(n, float(mass), cutoff, float(div), float(reg))


def scalar_h3_trace(m: float = 0.0) -> Callable[[float], float]:
    """``(4 pi t)^{-3/2} exp(-(1 + m^2) t)``."""
    return lambda t: (4 * np.pi * t) ** -1.5 * np.exp(-(1 + m * m) * t)


def h3_subtraction(m: float = 0.0) -> list[tuple[float, float]]:
    """Small-time monomials of :func:`scalar_h3_trace` with power ``<= 0``."""
    c = (4 * np.pi) ** -1.5
    return [(-1.5, c), (-0.5, -(1 + m * m) * c)]
