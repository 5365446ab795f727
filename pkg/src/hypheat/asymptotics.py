"""Small-time expansions of heat kernels at coincidence, in exact rationals.

Odd dimensions have a finite expansion (the ``a_{k,l}`` table).  Even
dimensions have an asymptotic series whose coefficients are obtained here by
integrating the next odd-dimensional kernel against ``cosh(s/2)`` term by
term; the two-dimensional case reduces to the classical Bernoulli formula.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from threading import Lock

import numpy as np

from .heatkernel import a_coefficients, odd_expression
from .series import RadialSeries

MAX_BERNOULLI_INDEX = 200

_bern_cache: list[Fraction] = [Fraction(1)]
_bern_lock = Lock()


def bernoulli(idx: int, *, allow_odd: bool = False, max_index: int = MAX_BERNOULLI_INDEX) -> Fraction:
    """Bernoulli number ``B_idx`` (convention ``B_1 = -1/2``).

    Odd indices are rejected unless ``allow_odd`` is set, in which case the
    exact value (zero for ``idx >= 3``) is returned.
    """
    if int(idx) != idx or idx < 0:
        raise ValueError("Bernoulli index must be a nonnegative integer")
    if idx > max_index:
        raise ValueError(f"Bernoulli index above the configured maximum {max_index}")
    if idx % 2 == 1 and not allow_odd:
        raise ValueError("odd Bernoulli index requested; pass allow_odd=True")
    if idx % 2 == 1 and idx >= 3:
        return Fraction(0)
    with _bern_lock:
        for m in range(len(_bern_cache), idx + 1):
            s = sum((comb(m + 1, j) * _bern_cache[j] for j in range(m)), Fraction(0))
            _bern_cache.append(-s / (m + 1))
    return _bern_cache[idx]


@dataclass(frozen=True)
class RationalSeries:
    """Coefficients ``c_0..c_L`` of a series in ``t`` and the stripped prefactor."""

    coeffs: tuple[Fraction, ...]
    normalization: str

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in self.coeffs))

    def __getitem__(self, l: int) -> Fraction:
        return self.coeffs[l]

    def __len__(self) -> int:
        return len(self.coeffs)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def terms(self, t: float) -> np.ndarray:
        return np.array([float(c) * t**l for l, c in enumerate(self.coeffs)])

    def partial_sum(self, t: float, count: int | None = None) -> float:
        """Sum of the first ``count`` terms (all terms by default)."""
        return float(self.terms(t)[:count].sum())

    def optimal_truncation(self, t: float) -> int:
        """Number of leading terms to keep: stop before the smallest-magnitude term.

        Terms that vanish identically are ignored when locating the minimum.
        """
        mags = np.abs(self.terms(t))
        candidates = [l for l in range(1, len(mags)) if self.coeffs[l] != 0]
        if not candidates:
            return len(mags)
        best = min(candidates, key=lambda l: mags[l])
        return best if best < candidates[-1] else len(mags)


def k2_series(L: int) -> RationalSeries:
    """Two-dimensional diagonal, ``(4 pi t) exp(t/4) K_2(0, t)``, to ``t^L``."""
    if L < 1:
        raise ValueError("need L >= 1")
    cs = [Fraction(1)]
    for l in range(1, L + 1):
        cs.append((Fraction(2) ** (1 - 2 * l) - 1) * bernoulli(2 * l) / factorial(l))
    return RationalSeries(tuple(cs), "(4 pi t)^(-1) exp(-(m^2 + 1/4) t)")


def _double_factorial_odd(j: int) -> int:
    """``(2j - 1)!!`` with ``(-1)!! = 1``."""
    out = 1
    for i in range(1, 2 * j, 2):
        out *= i
    return out


def even_coincidence_series(n: int, L: int) -> RationalSeries:
    """Asymptotic diagonal series of the even-dimensional kernel.

    Returns ``c_0..c_L`` with ``(4 pi t)^{n/2} exp(rho^2 t) K_n(0, t) ~ sum c_l t^l``.
    The kernel at the origin is written as an integral of the ``(n + 1)``-
    dimensional kernel against ``cosh(s/2)``; expanding that integrand in
    powers of ``s`` and integrating each Gaussian moment exactly gives the
    coefficients.
    """
    if n % 2 or n < 2:
        raise ValueError("even dimension >= 2 expected")
    if L < 0:
        raise ValueError("need L >= 0")
    k = (n - 2) // 2
    order = 2 * (L + k + 1)
    pref = odd_expression(n + 1).prefactor_series(order)
    half_cosh = RadialSeries(
        [Fraction(1, 4**(j // 2) * factorial(j)) if j % 2 == 0 else 0 for j in range(order + 1)],
        order,
    )
    cs = [Fraction(0)] * (L + 1)
    sign = Fraction(-2) ** (k + 1)
    for d, ser in pref.items():
        h = ser * half_cosh
        for l in range(L + 1):
            j = l + d - k - 1
            if 0 <= j and 2 * j <= h.order:
                cs[l] += sign * h.coeffs[2 * j] * 2**j * _double_factorial_odd(j)
    rho2 = Fraction(n - 1, 2) ** 2
    return RationalSeries(tuple(cs), f"(4 pi t)^(-{n}/2) exp(-(m^2 + {rho2}) t)")


def k4_series(L: int) -> RationalSeries:
    """Four-dimensional diagonal, ``(4 pi t)^2 exp(9t/4) K_4(0, t)``, to ``t^L``."""
    if L < 2:
        raise ValueError("need L >= 2")
    return even_coincidence_series(4, L)


def extract_a_coeffs(k: int) -> RationalSeries:
    """``a_{k,0..k-1}`` for ``n = 2k + 1``: the finite diagonal expansion."""
    if k < 1:
        raise ValueError("need k >= 1")
    return RationalSeries(a_coefficients(2 * k + 1), f"(4 pi t)^(-{2 * k + 1}/2) exp(-(m^2 + {k * k}) t)")


def diagonal_taylor(n: int, L: int) -> tuple[Fraction, ...]:
    """Coefficients of ``t^0..t^L`` in ``(4 pi t)^{n/2} K_n(0, t)`` (massless).

    The exponential ``exp(-rho^2 t)`` is multiplied back in exactly.
    """
    rho2 = Fraction(n - 1, 2) ** 2
    if n % 2:
        base = list(extract_a_coeffs((n - 1) // 2).coeffs)
    else:
        base = list(even_coincidence_series(n, L).coeffs)
    base = (base + [Fraction(0)] * (L + 1))[: L + 1]
    expo = [(-rho2) ** i / factorial(i) for i in range(L + 1)]
    return tuple(sum((base[i] * expo[l - i] for i in range(l + 1)), Fraction(0)) for l in range(L + 1))
