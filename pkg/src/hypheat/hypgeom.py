"""Geometry of hyperbolic n-space in the half-space and hyperboloid models."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy import integrate, linalg, special

from .jet import Jet

GROUP_TOL = 1e-12


@dataclass(frozen=True)
class DimensionParams:
    """Dimension ``n >= 2`` of hyperbolic space and a field mass ``m >= 0``.

    Attributes
    ----------
    rho
        ``(n - 1)/2`` as an exact rational.
    k
        ``floor((n - 1)/2)``; for odd ``n`` this gives ``n = 2k + 1``.
    """

    n: int
    mass: float = 0.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"dimension must be an integer >= 2, got {self.n!r}")
        if not (self.mass >= 0 and np.isfinite(self.mass)):
            raise ValueError(f"mass must be finite and nonnegative, got {self.mass!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "mass", float(self.mass))

    @property
    def rho(self) -> Fraction:
        return Fraction(self.n - 1, 2)

    @property
    def k(self) -> int:
        return (self.n - 1) // 2

    @property
    def is_odd(self) -> bool:
        return self.n % 2 == 1

    @property
    def gap(self) -> float:
        """Bottom of the massive spectrum, ``rho^2 + m^2``."""
        return float(self.rho) ** 2 + self.mass**2

    @property
    def sphere_area(self) -> float:
        """Area ``omega_{n-1}`` of the unit sphere in R^n."""
        return 2 * np.pi ** (self.n / 2) / special.gamma(self.n / 2)

    def with_mass(self, mass: float) -> "DimensionParams":
        return DimensionParams(self.n, mass)


@dataclass(frozen=True)
class HalfSpacePoint:
    """Point ``(x_1, ..., x_n)`` of the upper half-space, ``x_n > 0``."""

    coords: tuple[float, ...]

    def __init__(self, coords):
        c = tuple(float(v) for v in np.ravel(coords))
        if len(c) < 2:
            raise ValueError("half-space points need at least two coordinates")
        if not all(np.isfinite(c)):
            raise ValueError("coordinates must be finite")
        if c[-1] <= 0:
            raise ValueError(f"last coordinate must be positive, got {c[-1]}")
        object.__setattr__(self, "coords", c)

    @property
    def n(self) -> int:
        return len(self.coords)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.coords)


def _lorentz_metric(n: int) -> np.ndarray:
    j = -np.eye(n + 1)
    j[0, 0] = 1.0
    return j


@dataclass(frozen=True)
class MobiusElement:
    """Element of ``SO+(1, n)`` acting as an isometry of hyperbolic space."""

    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        h = np.array(self.matrix, dtype=float)
        if h.ndim != 2 or h.shape[0] != h.shape[1] or h.shape[0] < 3:
            raise ValueError("expected a square matrix of size n + 1 >= 3")
        j = _lorentz_metric(h.shape[0] - 1)
        if np.max(np.abs(h.T @ j @ h - j)) > GROUP_TOL * max(1.0, np.max(np.abs(h)) ** 2):
            raise ValueError("matrix does not preserve the Lorentz form")
        if abs(np.linalg.det(h) - 1) > GROUP_TOL * max(1.0, np.max(np.abs(h)) ** h.shape[0]):
            raise ValueError("matrix determinant is not 1")
        if h[0, 0] <= 0:
            raise ValueError("matrix is not orthochronous (h00 <= 0)")
        h.setflags(write=False)
        object.__setattr__(self, "matrix", h)

    @property
    def n(self) -> int:
        return self.matrix.shape[0] - 1

    @classmethod
    def identity(cls, n: int) -> "MobiusElement":
        return cls(np.eye(n + 1))

    @classmethod
    def boost(cls, n: int, axis: int, rapidity: float) -> "MobiusElement":
        """Boost mixing ``X_0`` with ``X_axis`` (``1 <= axis <= n``)."""
        h = np.eye(n + 1)
        ch, sh = np.cosh(rapidity), np.sinh(rapidity)
        h[0, 0] = h[axis, axis] = ch
        h[0, axis] = h[axis, 0] = sh
        return cls(h)

    @classmethod
    def rotation(cls, n: int, i: int, j: int, angle: float) -> "MobiusElement":
        """Rotation in the ``(X_i, X_j)`` plane, ``1 <= i, j <= n``."""
        h = np.eye(n + 1)
        c, s = np.cos(angle), np.sin(angle)
        h[i, i] = h[j, j] = c
        h[i, j], h[j, i] = -s, s
        return cls(h)

    @classmethod
    def from_generator(cls, boosts, rotation) -> "MobiusElement":
        """Exponential of the Lie-algebra element with boost vector ``boosts``
        (length n) and antisymmetric ``rotation`` block (n x n)."""
        b = np.asarray(boosts, dtype=float)
        a = np.asarray(rotation, dtype=float)
        n = b.size
        x = np.zeros((n + 1, n + 1))
        x[0, 1:] = b
        x[1:, 0] = b
        x[1:, 1:] = a - a.T
        return cls(linalg.expm(x))

    def __matmul__(self, other: "MobiusElement") -> "MobiusElement":
        return MobiusElement(self.matrix @ other.matrix)


def _check_pair(x: HalfSpacePoint, y: HalfSpacePoint) -> None:
    if x.n != y.n:
        raise ValueError(f"dimension mismatch: {x.n} vs {y.n}")


def chordal_u(x: HalfSpacePoint, y: HalfSpacePoint) -> float:
    """Chordal distance ``|x - y|^2 / (2 x_n y_n)``, so that ``cosh d = 1 + u``."""
    _check_pair(x, y)
    dx = x.array - y.array
    return float(dx @ dx / (2 * x.coords[-1] * y.coords[-1]))


def geodesic_distance(x: HalfSpacePoint, y: HalfSpacePoint) -> float:
    """Hyperbolic distance, computed as ``2 asinh(sqrt(u/2))`` for accuracy near 0."""
    return float(2 * np.arcsinh(np.sqrt(chordal_u(x, y) / 2)))


def to_hyperboloid(x: HalfSpacePoint) -> np.ndarray:
    """Map to the upper sheet ``X_0^2 - |X|^2 = 1`` with ``X_0 - X_n = 1/x_n``."""
    v = x.array
    xn = v[-1]
    s = v @ v
    out = np.empty(len(v) + 1)
    out[0] = (1 + s) / (2 * xn)
    out[1:-1] = v[:-1] / xn
    out[-1] = (s - 1) / (2 * xn)
    return out


def from_hyperboloid(big_x: np.ndarray) -> HalfSpacePoint:
    diff = big_x[0] - big_x[-1]
    if diff <= 0:
        raise ValueError("point is not on the upper hyperboloid sheet")
    xn = 1.0 / diff
    return HalfSpacePoint(np.concatenate([big_x[1:-1] * xn, [xn]]))


def mobius_apply(h: MobiusElement, x: HalfSpacePoint) -> HalfSpacePoint:
    """Act with ``h`` on ``x`` directly in half-space coordinates."""
    if h.n != x.n:
        raise ValueError(f"dimension mismatch: group of rank {h.n}, point in H^{x.n}")
    m = h.matrix
    n = x.n
    v = x.array
    s = v @ v
    lin = v[:-1]
    a_h = m[0, 0] + m[0, n] - m[n, 0] - m[n, n]
    b_h = m[0, 0] + m[n, n] - m[n, 0] - m[0, n]
    denom = a_h * s + 2 * (m[0, 1:n] - m[n, 1:n]) @ lin + b_h
    if not np.isfinite(denom) or denom <= 1e-300:
        raise ZeroDivisionError("point is mapped to the boundary at infinity")
    num = (m[1:n, 0] + m[1:n, n]) * s + 2 * m[1:n, 1:n] @ lin + m[1:n, 0] - m[1:n, n]
    out = np.empty(n)
    out[:-1] = num / denom
    out[-1] = 2 * v[-1] / denom
    return HalfSpacePoint(out)


def ball_volume(p: DimensionParams, r: float) -> float:
    """Volume of a geodesic ball of radius ``r``."""
    if r < 0:
        raise ValueError("radius must be nonnegative")
    n = p.n
    if n == 2:
        return float(4 * np.pi * np.sinh(r / 2) ** 2)
    if n == 3:
        return float(np.pi * (np.sinh(2 * r) - 2 * r))
    if n == 4:
        c = np.cosh(r)
        return float(2 * np.pi**2 * ((c - 1) ** 2 * (c + 2) / 3))
    val, _ = integrate.quad(lambda s: np.sinh(s) ** (n - 1), 0.0, r, epsabs=0, epsrel=1e-13)
    return float(p.sphere_area * val)


def radial_laplacian(f: Callable, p: DimensionParams, r: float) -> float:
    """``f'' + (n - 1) coth(r) f'`` for a radial function ``f``.

    If ``f`` accepts a :class:`~hypheat.jet.Jet` the derivatives are exact;
    otherwise a fourth-order central difference is used.
    """
    if r <= 0:
        raise ValueError("radial Laplacian needs r > 0")
    try:
        j = f(Jet(float(r), 1.0, 0.0))
    except (TypeError, AttributeError, ValueError):
        j = None
    if isinstance(j, Jet):
        d1, d2 = float(j.d1), float(j.d2)
    else:
        h = max(1e-3, 1e-3 * r) if r > 2e-3 else r / 3
        fm2, fm1, f0, fp1, fp2 = (float(f(r + i * h)) for i in (-2, -1, 0, 1, 2))
        d1 = (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * h)
        d2 = (-fm2 + 16 * fm1 - 30 * f0 + 16 * fp1 - fp2) / (12 * h * h)
    out = d2 + (p.n - 1) / np.tanh(r) * d1
    if not np.isfinite(out):
        raise FloatingPointError(f"radial Laplacian is not finite at r={r}")
    return float(out)


def van_vleck(p: DimensionParams, r: float) -> float:
    """Van Vleck-Morette determinant ``(r / sinh r)^(n-1)``; 1 at the origin."""
    if r < 0:
        raise ValueError("radius must be nonnegative")
    if r < 1e-4:
        ratio = 1 - r * r / 6 + 7 * r**4 / 360
    else:
        ratio = r / np.sinh(r)
    return float(ratio ** (p.n - 1))
