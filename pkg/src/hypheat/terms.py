"""Exact term algebra for radial functions of the form ``P(r, t) exp(-r^2/4t)``.

``P`` is a finite sum of monomials ``q * r**a * coth(r)**b * csch(r)**c * t**(-d)``
with rational ``q``.  The set is closed under ``d/dr`` and under
multiplication by ``csch r``, which is all the odd-dimensional heat kernels
and their relatives need.  Terms are normalized with ``coth^2 = 1 + csch^2``
so that ``b`` is 0 or 1.
"""

from __future__ import annotations

from fractions import Fraction
from functools import cached_property
from typing import Iterator, Mapping

import numpy as np

from . import _kernels
from .series import RadialSeries, r_coth_r, r_csch_r

Key = tuple[int, int, int, int]

#: Below this radius the prefactor is evaluated from its exact Taylor series.
SERIES_RADIUS = 0.5
#: Taylor order used for the small-radius branch.
SERIES_ORDER = 48


def _normalized(raw: Mapping[Key, Fraction]) -> dict[Key, Fraction]:
    out: dict[Key, Fraction] = {}
    stack = list(raw.items())
    while stack:
        (a, b, c, d), q = stack.pop()
        if q == 0:
            continue
        if b >= 2:
            stack.append(((a, b - 2, c, d), q))
            stack.append(((a, b - 2, c + 2, d), q))
            continue
        key = (a, b, c, d)
        out[key] = out.get(key, Fraction(0)) + q
    return {k: v for k, v in out.items() if v != 0}


class GaussianTermExpr:
    """Immutable sum of Gaussian-weighted hyperbolic monomials.

    Parameters
    ----------
    terms
        Mapping ``(a, b, c, d) -> coefficient`` for
        ``r**a coth**b csch**c t**-d``; the factor ``exp(-r^2/4t)`` is implicit.
    """

    __slots__ = ("_terms", "__dict__")

    def __init__(self, terms: Mapping[Key, Fraction | int] | None = None):
        raw = {tuple(int(e) for e in k): Fraction(v) for k, v in (terms or {}).items()}
        if any(e < 0 for k in raw for e in k):
            raise ValueError("term exponents must be nonnegative")
        self._terms = _normalized(raw)

    @classmethod
    def unit(cls) -> "GaussianTermExpr":
        """The bare Gaussian ``exp(-r^2/4t)``."""
        return cls({(0, 0, 0, 0): 1})

    # mapping-like access --------------------------------------------------
    @property
    def terms(self) -> dict[Key, Fraction]:
        return dict(self._terms)

    def __iter__(self) -> Iterator[tuple[Key, Fraction]]:
        return iter(sorted(self._terms.items()))

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GaussianTermExpr):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __repr__(self) -> str:
        return f"GaussianTermExpr({len(self)} terms)"

    # algebra --------------------------------------------------------------
    def __add__(self, other: "GaussianTermExpr") -> "GaussianTermExpr":
        merged = dict(self._terms)
        for k, v in other._terms.items():
            merged[k] = merged.get(k, Fraction(0)) + v
        return GaussianTermExpr(merged)

    def scale(self, q: Fraction | int) -> "GaussianTermExpr":
        return GaussianTermExpr({k: v * q for k, v in self._terms.items()})

    def diff_r(self) -> "GaussianTermExpr":
        """Exact ``d/dr`` including the Gaussian factor."""
        out: dict[Key, Fraction] = {}

        def put(key: Key, q: Fraction) -> None:
            out[key] = out.get(key, Fraction(0)) + q

        for (a, b, c, d), q in self._terms.items():
            if a:
                put((a - 1, b, c, d), q * a)
            if b:
                put((a, b - 1, c + 2, d), -q * b)
            if c:
                put((a, b + 1, c, d), -q * c)
            put((a + 1, b, c, d + 1), -q / 2)
        return GaussianTermExpr(out)

    def diff_t(self) -> "GaussianTermExpr":
        """Exact ``d/dt`` including the Gaussian factor."""
        out: dict[Key, Fraction] = {}
        for (a, b, c, d), q in self._terms.items():
            if d:
                k = (a, b, c, d + 1)
                out[k] = out.get(k, Fraction(0)) - q * d
            k = (a + 2, b, c, d + 2)
            out[k] = out.get(k, Fraction(0)) + q / 4
        return GaussianTermExpr(out)

    def mul_csch(self, power: int = 1) -> "GaussianTermExpr":
        return GaussianTermExpr({(a, b, c + power, d): q for (a, b, c, d), q in self._terms.items()})

    def mul_coth(self) -> "GaussianTermExpr":
        return GaussianTermExpr({(a, b + 1, c, d): q for (a, b, c, d), q in self._terms.items()})

    def recurrence_step(self) -> "GaussianTermExpr":
        """Apply ``(1/sinh r) d/dr`` exactly."""
        return self.diff_r().mul_csch()

    @property
    def max_d(self) -> int:
        return max((k[3] for k in self._terms), default=0)

    # numeric evaluation ---------------------------------------------------
    @cached_property
    def _arrays(self):
        items = sorted(self._terms.items())
        coef = np.array([float(q) for _, q in items], dtype=np.float64)
        cols = np.array([k for k, _ in items], dtype=np.int64).reshape(-1, 4)
        return (coef,) + tuple(np.ascontiguousarray(cols[:, i]) for i in range(4))

    @cached_property
    def _series_floats(self) -> dict[int, np.ndarray]:
        return {d: s.to_floats() for d, s in self.prefactor_series(SERIES_ORDER).items()}

    def prefactor(self, r, t: float) -> np.ndarray:
        """Evaluate ``P(r, t)`` (the sum without the Gaussian factor).

        Radii below :data:`SERIES_RADIUS` go through the exact Taylor series so
        that ``r = 0`` never touches ``csch(0)``.
        """
        r = np.atleast_1d(np.asarray(r, dtype=float))
        out = np.empty_like(r)
        small = np.abs(r) < SERIES_RADIUS
        if np.any(~small) and self._terms:
            out[~small] = _kernels.eval_terms(*self._arrays, r[~small], t)
        elif not self._terms:
            out[:] = 0.0
        if np.any(small):
            x = r[small]
            acc = np.zeros_like(x)
            for d, cs in self._series_floats.items():
                poly = np.zeros_like(x) + cs[-1]
                for c in cs[-2::-1]:
                    poly = poly * x + c
                acc += poly * t ** (-d)
            out[small] = acc
        return out

    def evaluate(self, r, t: float) -> np.ndarray:
        """``P(r, t) exp(-r^2/4t)``."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        return self.prefactor(r, t) * np.exp(-(r * r) / (4.0 * t))

    # exact series ---------------------------------------------------------
    def prefactor_series(self, order: int = 12) -> dict[int, RadialSeries]:
        """Taylor series in ``r`` of each ``t**-d`` coefficient of ``P``.

        Negative powers produced by individual ``csch`` factors must cancel
        in the sum; a :class:`ValueError` is raised if they do not (the
        expression is then singular at the origin).
        """
        if not self._terms:
            return {}
        shifts = [a - b - c for (a, b, c, _d) in self._terms]
        lo = min(0, min(shifts))
        base_order = order - lo
        xs = r_coth_r(base_order)
        ys = r_csch_r(base_order)
        ypow: dict[int, RadialSeries] = {0: RadialSeries.constant(1, base_order)}
        maxc = max(k[2] for k in self._terms)
        for c in range(1, maxc + 1):
            ypow[c] = ypow[c - 1] * ys
        laurent: dict[int, list[Fraction]] = {}
        for (a, b, c, d), q in self._terms.items():
            s = ypow[c] * xs if b else ypow[c]
            shift = a - b - c
            acc = laurent.setdefault(d, [Fraction(0)] * (order - lo + 1))
            for j in range(order - shift + 1):
                acc[j + shift - lo] += q * s.coeffs[j]
        out: dict[int, RadialSeries] = {}
        for d, acc in laurent.items():
            if any(v != 0 for v in acc[: -lo]):
                raise ValueError("expression is singular at r = 0")
            out[d] = RadialSeries(acc[-lo:], order)
        return out

    def limit_at_zero(self) -> dict[int, Fraction]:
        """Exact ``r -> 0`` value of each ``t**-d`` coefficient of ``P``."""
        return {d: s.coeffs[0] for d, s in self.prefactor_series(2).items()}
