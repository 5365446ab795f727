"""Truncated power series in one variable with exact rational coefficients.

A :class:`RadialSeries` stores ``c_0 + c_1 r + ... + c_J r^J`` together with
the order ``J`` up to which the coefficients are trusted.  Every operation
propagates that order, so a result never claims more accuracy than its inputs
support.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterable

import numpy as np

Rational = Fraction | int


def _frac(x: Rational) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class RadialSeries:
    """Power series ``sum_j c_j r^j`` truncated at order ``J`` (inclusive).

    Parameters
    ----------
    coeffs
        Coefficients ``c_0..c_J``.  Missing trailing entries are zero.
    order
        Highest trusted power.  Defaults to ``len(coeffs) - 1``.
    """

    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs: Iterable[Rational], order: int | None = None):
        cs = [_frac(c) for c in coeffs]
        if order is None:
            order = len(cs) - 1
        if order < 0:
            raise ValueError("series order underflow: no trusted coefficients remain")
        cs = cs[: order + 1] + [Fraction(0)] * (order + 1 - len(cs))
        self.coeffs: tuple[Fraction, ...] = tuple(cs)
        self.order: int = order

    # construction helpers -------------------------------------------------
    @classmethod
    def constant(cls, value: Rational, order: int) -> "RadialSeries":
        return cls([value], order)

    @classmethod
    def monomial(cls, power: int, order: int, coeff: Rational = 1) -> "RadialSeries":
        cs = [Fraction(0)] * (order + 1)
        if power <= order:
            cs[power] = _frac(coeff)
        return cls(cs, order)

    # basic protocol -------------------------------------------------------
    def __getitem__(self, j: int) -> Fraction:
        if j > self.order:
            raise IndexError(f"coefficient r^{j} beyond trusted order {self.order}")
        return self.coeffs[j]

    def __len__(self) -> int:
        return self.order + 1

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RadialSeries):
            return NotImplemented
        m = min(self.order, other.order)
        return self.coeffs[: m + 1] == other.coeffs[: m + 1]

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        body = ", ".join(str(c) for c in self.coeffs)
        return f"RadialSeries([{body}], order={self.order})"

    @property
    def is_even(self) -> bool:
        return all(c == 0 for c in self.coeffs[1::2])

    def truncate(self, order: int) -> "RadialSeries":
        return RadialSeries(self.coeffs, min(order, self.order))

    # arithmetic -----------------------------------------------------------
    def _coerce(self, other) -> "RadialSeries":
        if isinstance(other, RadialSeries):
            return other
        return RadialSeries.constant(other, self.order)

    def __add__(self, other) -> "RadialSeries":
        o = self._coerce(other)
        m = min(self.order, o.order)
        return RadialSeries([a + b for a, b in zip(self.coeffs[: m + 1], o.coeffs[: m + 1])], m)

    __radd__ = __add__

    def __neg__(self) -> "RadialSeries":
        return RadialSeries([-c for c in self.coeffs], self.order)

    def __sub__(self, other) -> "RadialSeries":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "RadialSeries":
        return self._coerce(other) - self

    def __mul__(self, other) -> "RadialSeries":
        if not isinstance(other, RadialSeries):
            f = _frac(other)
            return RadialSeries([c * f for c in self.coeffs], self.order)
        m = min(self.order, other.order)
        a, b = self.coeffs, other.coeffs
        out = [Fraction(0)] * (m + 1)
        for i in range(m + 1):
            ai = a[i]
            if ai == 0:
                continue
            for j in range(m + 1 - i):
                if b[j]:
                    out[i + j] += ai * b[j]
        return RadialSeries(out, m)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RadialSeries":
        if not isinstance(other, RadialSeries):
            f = _frac(other)
            return RadialSeries([c / f for c in self.coeffs], self.order)
        return self * other.reciprocal()

    def reciprocal(self) -> "RadialSeries":
        """Multiplicative inverse; requires a nonzero constant term."""
        a = self.coeffs
        if a[0] == 0:
            raise ZeroDivisionError("series division requires a nonzero constant term")
        inv0 = 1 / a[0]
        out = [inv0]
        for j in range(1, self.order + 1):
            s = sum((a[i] * out[j - i] for i in range(1, j + 1)), Fraction(0))
            out.append(-s * inv0)
        return RadialSeries(out, self.order)

    def power(self, alpha: Rational) -> "RadialSeries":
        """``self**alpha`` for rational ``alpha``; requires constant term 1.

        Uses the recurrence obtained from ``f g' = alpha f' g`` with
        ``g = f**alpha``.
        """
        alpha = _frac(alpha)
        a = self.coeffs
        if a[0] != 1:
            raise ValueError("rational powers need a unit constant term")
        out = [Fraction(1)]
        for j in range(1, self.order + 1):
            s = Fraction(0)
            for i in range(1, j + 1):
                if a[i]:
                    s += (alpha * i - (j - i)) * a[i] * out[j - i]
            out.append(s / j)
        return RadialSeries(out, self.order)

    def derivative(self) -> "RadialSeries":
        """d/dr; the trusted order drops by one."""
        return RadialSeries([j * self.coeffs[j] for j in range(1, self.order + 1)], self.order - 1)

    def shift_down(self, k: int = 1) -> "RadialSeries":
        """Divide by ``r**k``; the first ``k`` coefficients must vanish."""
        if any(c != 0 for c in self.coeffs[:k]):
            raise ValueError("division by r^k of a series with low-order content")
        return RadialSeries(self.coeffs[k:], self.order - k)

    def shift_up(self, k: int = 1) -> "RadialSeries":
        """Multiply by ``r**k``; the trusted order rises by ``k``."""
        return RadialSeries([Fraction(0)] * k + list(self.coeffs), self.order + k)

    # evaluation -----------------------------------------------------------
    def to_floats(self) -> np.ndarray:
        return np.array([float(c) for c in self.coeffs])

    def __call__(self, r):
        """Horner evaluation in floating point (scalars or arrays)."""
        cs = self.to_floats()
        acc = np.zeros_like(np.asarray(r, dtype=float)) + cs[-1]
        for c in cs[-2::-1]:
            acc = acc * r + c
        return acc


# standard hyperbolic series ----------------------------------------------


@lru_cache(maxsize=None)
def sinh_over_r(order: int) -> RadialSeries:
    """``sinh(r)/r`` to the given order."""
    cs = [Fraction(0)] * (order + 1)
    fact = Fraction(1)
    for j in range(0, order + 1, 2):
        if j > 0:
            fact *= j * (j + 1)
        cs[j] = 1 / fact
    return RadialSeries(cs, order)


@lru_cache(maxsize=None)
def cosh_series(order: int) -> RadialSeries:
    cs = [Fraction(0)] * (order + 1)
    fact = Fraction(1)
    for j in range(0, order + 1, 2):
        if j > 0:
            fact *= (j - 1) * j
        cs[j] = 1 / fact
    return RadialSeries(cs, order)


@lru_cache(maxsize=None)
def r_csch_r(order: int) -> RadialSeries:
    """``r / sinh r``."""
    return sinh_over_r(order).reciprocal()


@lru_cache(maxsize=None)
def r_coth_r(order: int) -> RadialSeries:
    """``r cosh r / sinh r``."""
    return cosh_series(order) * r_csch_r(order)

