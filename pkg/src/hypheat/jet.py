"""Second-order forward-mode differentiation.

A :class:`Jet` carries ``(f, f', f'')`` through arithmetic and the numpy /
scipy ufuncs listed in ``_UNARY``.  Components may be scalars or arrays.
Used wherever an exact radial Laplacian is preferable to finite differences.
"""

from __future__ import annotations

import numpy as np
from scipy import special

_SQRT_PI = np.sqrt(np.pi)


class Jet:
    """Truncated Taylor triple ``(v, d1, d2)`` = value, first and second derivative."""

    __slots__ = ("v", "d1", "d2")

    def __init__(self, v, d1=0.0, d2=0.0):
        self.v, self.d1, self.d2 = v, d1, d2

    @classmethod
    def variable(cls, x) -> "Jet":
        return cls(x, np.ones_like(x, dtype=float) if np.ndim(x) else 1.0, 0.0)

    def __repr__(self) -> str:
        return f"Jet({self.v!r}, {self.d1!r}, {self.d2!r})"

    # comparisons act on the value so that branch logic keeps working
    def __lt__(self, o):
        return self.v < _val(o)

    def __le__(self, o):
        return self.v <= _val(o)

    def __gt__(self, o):
        return self.v > _val(o)

    def __ge__(self, o):
        return self.v >= _val(o)

    def __float__(self) -> float:
        return float(self.v)

    # arithmetic ------------------------------------------------------------
    def __neg__(self):
        return Jet(-self.v, -self.d1, -self.d2)

    def __pos__(self):
        return self

    def __add__(self, o):
        if isinstance(o, Jet):
            return Jet(self.v + o.v, self.d1 + o.d1, self.d2 + o.d2)
        return Jet(self.v + o, self.d1, self.d2)

    __radd__ = __add__

    def __sub__(self, o):
        return self + (-o)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        if isinstance(o, Jet):
            return Jet(
                self.v * o.v,
                self.d1 * o.v + self.v * o.d1,
                self.d2 * o.v + 2 * self.d1 * o.d1 + self.v * o.d2,
            )
        return Jet(self.v * o, self.d1 * o, self.d2 * o)

    __rmul__ = __mul__

    def reciprocal(self):
        inv = 1.0 / self.v
        return _chain(self, inv, -inv * inv, 2 * inv**3)

    def __truediv__(self, o):
        if isinstance(o, Jet):
            return self * o.reciprocal()
        return Jet(self.v / o, self.d1 / o, self.d2 / o)

    def __rtruediv__(self, o):
        return self.reciprocal() * o

    def __pow__(self, p):
        if isinstance(p, Jet):
            return np.exp(np.log(self) * p)
        if p == 0:
            return Jet(np.ones_like(self.v), 0.0 * self.d1, 0.0 * self.d2)
        if float(p).is_integer() and p > 0:
            p = int(p)
            base = self.v ** (p - 2) if p >= 2 else 0.0
            return _chain(self, self.v**p, p * self.v ** (p - 1), p * (p - 1) * base)
        return _chain(self, self.v**p, p * self.v ** (p - 1), p * (p - 1) * self.v ** (p - 2))

    def __rpow__(self, base):
        return np.exp(self * np.log(base))

    def __abs__(self):
        s = np.sign(self.v)
        return Jet(abs(self.v), s * self.d1, s * self.d2)

    # numpy / scipy ufunc dispatch -----------------------------------------
    def __array_ufunc__(self, ufunc, method, *inputs, **kwargs):
        if method != "__call__" or kwargs:
            return NotImplemented
        if len(inputs) == 1 and ufunc in _UNARY:
            return _UNARY[ufunc](inputs[0])
        binary = {
            np.add: lambda a, b: a + b,
            np.subtract: lambda a, b: a - b,
            np.multiply: lambda a, b: a * b,
            np.true_divide: lambda a, b: a / b,
            np.power: lambda a, b: a**b,
        }
        if ufunc in binary and len(inputs) == 2:
            a, b = inputs
            if not isinstance(a, Jet):
                a = Jet(a, 0.0, 0.0)
            return binary[ufunc](a, b)
        return NotImplemented


def _val(x):
    return x.v if isinstance(x, Jet) else x


def _chain(g: Jet, f0, f1, f2) -> Jet:
    return Jet(f0, f1 * g.d1, f2 * g.d1 * g.d1 + f1 * g.d2)


def _sin(g):
    s, c = np.sin(g.v), np.cos(g.v)
    return _chain(g, s, c, -s)


def _cos(g):
    s, c = np.sin(g.v), np.cos(g.v)
    return _chain(g, c, -s, -c)


def _exp(g):
    e = np.exp(g.v)
    return _chain(g, e, e, e)


def _log(g):
    return _chain(g, np.log(g.v), 1.0 / g.v, -1.0 / (g.v * g.v))


def _sinh(g):
    s, c = np.sinh(g.v), np.cosh(g.v)
    return _chain(g, s, c, s)


def _cosh(g):
    s, c = np.sinh(g.v), np.cosh(g.v)
    return _chain(g, c, s, c)


def _tanh(g):
    th = np.tanh(g.v)
    sech2 = 1 - th * th
    return _chain(g, th, sech2, -2 * th * sech2)


def _sqrt(g):
    s = np.sqrt(g.v)
    return _chain(g, s, 0.5 / s, -0.25 / (s * g.v))


def _arcsinh(g):
    q = 1.0 / np.sqrt(1 + g.v * g.v)
    return _chain(g, np.arcsinh(g.v), q, -g.v * q**3)


def _erf(g):
    d = 2 / _SQRT_PI * np.exp(-g.v * g.v)
    return _chain(g, special.erf(g.v), d, -2 * g.v * d)


def _erfc(g):
    d = -2 / _SQRT_PI * np.exp(-g.v * g.v)
    return _chain(g, special.erfc(g.v), d, -2 * g.v * d)


def _erfcx(g):
    e = special.erfcx(g.v)
    d = 2 * g.v * e - 2 / _SQRT_PI
    return _chain(g, e, d, 2 * e + 2 * g.v * d)


def _negative(g):
    return -g


def _square(g):
    return g * g


_UNARY = {
    np.sin: _sin,
    np.cos: _cos,
    np.exp: _exp,
    np.log: _log,
    np.sinh: _sinh,
    np.cosh: _cosh,
    np.tanh: _tanh,
    np.sqrt: _sqrt,
    np.arcsinh: _arcsinh,
    np.negative: _negative,
    np.square: _square,
    special.erf: _erf,
    special.erfc: _erfc,
    special.erfcx: _erfcx,
}


def value(x):
    """Strip derivative information."""
    return x.v if isinstance(x, Jet) else x
