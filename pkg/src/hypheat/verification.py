"""Acceptance checks shared by the test-suite and ``hypheat verify``.

Each check returns a :class:`CheckResult` holding the largest measured
deviation and the tolerance it is held to.  Reference values are written out
here independently of the code paths under test wherever a closed form
exists.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy import integrate

from .asymptotics import extract_a_coeffs, k2_series, k4_series
from .effaction import (
    direct_action_density,
    w_even_decomposition,
    w_h3_decomposition,
    w_odd_decomposition,
)
from .fourier import plancherel_density, plancherel_sides
from .heatkernel import descend, heat_residual, odd_values, p_even, p_odd, spectral_kernel
from .hypgeom import DimensionParams, HalfSpacePoint
from .quadrature import gauss_kronrod
from .u1gauge import bitensor_identity_check, q_inverse, q_tilde_ode_residual, u1_trace
from .wkb import CurvatureInvariants, ghost_subtracted_traces, scalar_b2_polynomial, scalar_coincidence, u1_traces

#: Seed of the random point pairs in the bi-tensor check.
IDENTITY_SEED = 20240611


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one acceptance check."""

    index: int
    name: str
    passed: bool
    deviation: float
    tolerance: float
    detail: str = ""
    #: ``deviation`` is the worst ratio of measured deviation to tolerance
    #: over several sub-checks, and ``tolerance`` is then 1.
    scaled: bool = False

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        label = "worst deviation/tolerance" if self.scaled else "deviation"
        text = f"[{status}] {self.index:2d} {self.name}: {label} {self.deviation:.3g} (limit {self.tolerance:.3g})"
        return text + (f"; {self.detail}" if self.detail else "")


def _rel(a: float, b: float) -> float:
    return _worst(abs(a - b) / max(abs(b), 1e-300))


def _worst(*values) -> float:
    """Largest value, with NaN counted as infinite (plain ``max`` can drop a NaN)."""
    if len(values) == 1 and not np.isscalar(values[0]):
        values = tuple(values[0])
    arr = np.asarray(values, dtype=float)
    return float(np.max(np.where(np.isnan(arr), np.inf, arr)))


def _result(
    index: int, name: str, deviation: float, tol: float, detail: str = "", exact_ok: bool = True, scaled: bool = False
) -> CheckResult:
    return CheckResult(index, name, bool(exact_ok and deviation <= tol), float(deviation), tol, detail, scaled)


# ---------------------------------------------------------------------------
# 1: closed-form odd kernels against hand-written formulas


def _p3_ref(r, t):
    return (4 * np.pi * t) ** -1.5 * r / np.sinh(r) * np.exp(-(r * r / (4 * t) + t))


def _g_ref(r, t):
    return 2 * t * (r * np.cosh(r) - np.sinh(r)) / np.sinh(r) ** 3


def _p5_ref(r, t):
    return (4 * np.pi * t) ** -2.5 * ((r / np.sinh(r)) ** 2 + _g_ref(r, t)) * np.exp(-(r * r / (4 * t) + 4 * t))


def _p7_ref(r, t):
    coth = 1 / np.tanh(r)
    dg = 2 * t / np.sinh(r) ** 2 * (r + 3 * coth - 3 * r * coth**2)
    bracket = (r / np.sinh(r)) ** 3 + 3 * r / np.sinh(r) * _g_ref(r, t) - 2 * t / np.sinh(r) * dg
    return (4 * np.pi * t) ** -3.5 * bracket * np.exp(-(r * r / (4 * t) + 9 * t))


def check_closed_forms() -> CheckResult:
    rs = np.linspace(0.2, 3.0, 5)
    ts = np.array([0.05, 0.2, 0.5, 1.0, 2.0])
    worst = 0.0
    for n, ref in ((3, _p3_ref), (5, _p5_ref), (7, _p7_ref)):
        for t in ts:
            got = odd_values(n, rs, t)
            worst = _worst(worst, float(np.max(np.abs(got - ref(rs, t)) / np.abs(ref(rs, t)))))
    return _result(1, "closed-form odd kernels", worst, 1e-12)


# ---------------------------------------------------------------------------
# 2: heat-equation residuals


def check_heat_residuals() -> CheckResult:
    grid = np.linspace(0.2, 2.0, 4)
    worst = _worst(heat_residual(DimensionParams(n), r, t) for n in range(2, 8) for r in grid for t in grid)
    return _result(2, "heat-equation residuals", worst, 1e-6)


# ---------------------------------------------------------------------------
# 3: stochastic completeness


def _kernel_mass(n: int, t: float) -> float:
    p = DimensionParams(n)
    if p.is_odd:
        kern = lambda r: odd_values(n, r, t)  # noqa: E731
    else:
        kern = lambda r: np.array([p_even(p, ri, t).value for ri in r])  # noqa: E731
    r_max = 2 * (n - 1) * t + 20 * np.sqrt(t)
    res = gauss_kronrod(lambda r: kern(r) * np.sinh(r) ** (n - 1), 0.0, r_max, rtol=1e-12, atol=1e-300)
    return p.sphere_area * res.value


def check_stochastic_completeness() -> CheckResult:
    worst = _worst(abs(_kernel_mass(n, t) - 1) for n in (2, 3, 4, 5) for t in (0.1, 1.0))
    return _result(3, "stochastic completeness", worst, 1e-7)


# ---------------------------------------------------------------------------
# 4: finite diagonal coefficients


def check_a_coefficients() -> CheckResult:
    expected = {1: (1,), 2: (1, Fraction(2, 3)), 3: (1, 2, Fraction(16, 15))}
    bad = [k for k, v in expected.items() if extract_a_coeffs(k).coeffs != tuple(Fraction(x) for x in v)]
    return _result(4, "odd-dimension diagonal coefficient table", float(len(bad)), 0.0,
                   f"mismatch for k={bad}" if bad else "exact")


# ---------------------------------------------------------------------------
# 5: scalar WKB coincidence values


def check_wkb_scalar() -> CheckResult:
    bad = []
    for n in range(2, 13):
        p = DimensionParams(n)
        try:
            _, b1, b2 = scalar_coincidence(p)
        except ArithmeticError as exc:
            bad.append(f"n={n}: {exc}")
            continue
        if b1 != Fraction(-n * (n - 1), 6) or b2 != scalar_b2_polynomial(n):
            bad.append(f"n={n}: b1={b1}, b2={b2}")
        if CurvatureInvariants.of(p).scalar_b2() != b2:
            bad.append(f"n={n}: invariant form {CurvatureInvariants.of(p).scalar_b2()} != {b2}")
    return _result(5, "scalar coincidence coefficients", float(len(bad)), 0.0, "; ".join(bad) or "exact")


# ---------------------------------------------------------------------------
# 6: descent between dimensions


def _descent_scipy(n_src: int, r: float, t: float) -> float:
    """Descent integral in the distance variable with QUADPACK's algebraic weight.

    This avoids the substitution used by the library, so it is an
    independent route to the lower-dimensional kernel (``r > 0``).
    """

    def g(s):
        # (s - r) / (cosh s - cosh r) written without cancellation
        x = 0.5 * (s - r)
        ratio = (x / np.sinh(x) if x else 1.0) / np.sinh(0.5 * (s + r))
        return odd_values(n_src, np.array([s]), t)[0] * np.sinh(s) * np.sqrt(ratio)

    upper = r + 40 * np.sqrt(t) + 4 * t * (n_src - 1)
    val, _ = integrate.quad(g, r, upper, weight="alg", wvar=(-0.5, 0.0), epsabs=0, epsrel=1e-12, limit=200)
    n = n_src - 2
    return float(np.sqrt(2.0) * np.exp((2 * n + 1) * t / 4) * val)


def check_descent() -> CheckResult:
    points = ((0.3, 0.5), (1.0, 1.0), (2.0, 0.3))
    worst = 0.0
    for src, target in ((3, 2), (5, 4)):
        for r, t in points:
            got = descend(DimensionParams(src), r, t).value
            worst = _worst(worst, _rel(got, p_even(DimensionParams(target), r, t).value))
            worst = _worst(worst, _rel(got, _descent_scipy(src, r, t)))
    return _result(6, "descent relation", worst, 1e-6, "against the quadrature kernel and an unsubstituted integral")


# ---------------------------------------------------------------------------
# 7: spectral representation


def check_fourier() -> CheckResult:
    worst_kernel = 0.0
    for n in (3, 5):
        p = DimensionParams(n)
        for r, t in ((0.5, 0.3), (1.0, 1.0), (2.5, 2.0)):
            worst_kernel = _worst(worst_kernel, _rel(spectral_kernel(p, r, t).value, p_odd(p, r, t).value))
    worst_planch = 0.0
    for n in (3, 5):
        spatial, spectral = plancherel_sides(lambda r: np.exp(-r * r), DimensionParams(n))
        worst_planch = _worst(worst_planch, _rel(spectral, spatial))
    lams = np.array([0.25, 0.5, 1.0, 2.0, 7.5])
    exact = bool(np.all(plancherel_density(DimensionParams(3), lams) == lams**2))
    dev = _worst(worst_kernel / 1e-7, worst_planch / 1e-6)
    detail = f"kernel {worst_kernel:.2g}, Plancherel {worst_planch:.2g}, |c|^-2 = lambda^2 exact: {exact}"
    return _result(7, "spectral kernel and Plancherel identity", dev, 1.0, detail, exact, scaled=True)


# ---------------------------------------------------------------------------
# 8: even-dimension coincidence series


def check_even_series() -> CheckResult:
    k2 = k2_series(4).coeffs
    k4 = k4_series(4).coeffs
    want2 = (Fraction(-1, 12), Fraction(7, 480))
    want4 = (Fraction(1, 4), Fraction(-1, 96))
    exact_ok = k2[1:3] == want2 and k4[1:3] == want4
    t = 0.01
    s2 = sum(float(c) * t**l for l, c in enumerate(k2))
    s4 = sum(float(c) * t**l for l, c in enumerate(k4))
    d2 = abs(s2 - p_even(DimensionParams(2), 0.0, t).value * 4 * np.pi * t * np.exp(t / 4))
    d4 = abs(s4 - p_even(DimensionParams(4), 0.0, t).value * (4 * np.pi * t) ** 2 * np.exp(9 * t / 4))
    dev = _worst(d2 / 2e-6, d4 / 1e-4)
    detail = (
        f"K2 coefficients {k2[1]}, {k2[2]}; K4 coefficients {k4[1]}, {k4[2]} "
        f"(expected {want4[0]}, {want4[1]}); small-t deviations {d2:.2g}, {d4:.2g}"
    )
    return _result(8, "two- and four-dimensional series", dev, 1.0, detail, exact_ok, scaled=True)


# ---------------------------------------------------------------------------
# 9: U(1) trace in three dimensions


def check_u1_trace() -> CheckResult:
    p = DimensionParams(3)
    worst = 0.0
    for t in (0.1, 0.5, 1.0, 2.0):
        ref = (2 + 4 * t + np.exp(-t)) * (4 * np.pi * t) ** -1.5
        worst = _worst(worst, _rel(u1_trace(p, 0.0, t), ref))
    exact_ok = u1_traces(p) == (3, 3, Fraction(1, 2)) and ghost_subtracted_traces(p) == (1, 5, Fraction(-1, 2))
    detail = f"traces {tuple(str(v) for v in u1_traces(p))}, ghost-subtracted {tuple(str(v) for v in ghost_subtracted_traces(p))}"
    return _result(9, "U(1) trace in three dimensions", worst, 1e-6, detail, exact_ok)


# ---------------------------------------------------------------------------
# 10: effective actions


def check_effective_actions() -> CheckResult:
    split = 0.0
    for n in (2, 3, 4, 5):
        p = DimensionParams(n)
        for cutoff in (1.0, 3.0, 10.0, 30.0):
            dec = w_odd_decomposition(p, 0.0, cutoff) if p.is_odd else w_even_decomposition(p, 0.0, cutoff)
            split = _worst(split, _rel(dec.total, direct_action_density(p, 0.0, cutoff)))
    h3 = 0.0
    for m in (0.0, 1.0):
        const = (m * m + 1) ** 1.5 / (12 * np.pi)
        h3 = _worst(h3, _rel(w_h3_decomposition(m, 1e12).regular, const))
        h3 = _worst(h3, _rel(w_odd_decomposition(DimensionParams(3), m, 1e12).regular, const))
    h5 = _rel(w_odd_decomposition(DimensionParams(5), 0.0, 1e7).regular, -7 / (45 * np.pi**2))
    dev = _worst(split / 1e-8, h3 / 1e-10, h5 / 1e-6)
    detail = f"split {split:.2g}, three-dimensional constant {h3:.2g}, five-dimensional density {h5:.2g}"
    return _result(10, "effective-action splits", dev, 1.0, detail, scaled=True)


# ---------------------------------------------------------------------------
# 11: bi-tensor identities


def _random_pair(rng: np.random.Generator, n: int) -> tuple[HalfSpacePoint, HalfSpacePoint]:
    def point():
        return HalfSpacePoint(np.concatenate([rng.uniform(-1, 1, n - 1), rng.uniform(0.4, 2.0, 1)]))

    return point(), point()


def check_bitensor_identities() -> CheckResult:
    rng = np.random.default_rng(IDENTITY_SEED)
    worst = 0.0
    failures = 0
    for n in (2, 3, 4):
        p = DimensionParams(n)
        for _ in range(20):
            rep = bitensor_identity_check(p, *_random_pair(rng, n))
            worst = _worst(worst, *rep.deviations.values(), *rep.coincidence_errors().values())
            failures += not rep.passed
    return _result(11, "bi-tensor identities", worst, 1e-6, f"{failures} failing pairs")


# ---------------------------------------------------------------------------
# 12: the Q component


def check_q_component() -> CheckResult:
    p = DimensionParams(3)
    ode = _worst(abs(q_tilde_ode_residual(lam, t, p)) for lam in (0.5, 1.3, 3.0) for t in (0.1, 0.5, 1.0))
    inv = 0.0
    for t, r in ((0.5, 0.5), (1.0, 1.0), (2.0, 0.3)):
        inv = _worst(inv, _rel(q_inverse(t, r, p, method="quadrature"), q_inverse(t, r, p, method="closed")))
    dev = _worst(ode / 1e-8, inv / 1e-6)
    return _result(12, "Q component ODE and inversion", dev, 1.0, f"ODE residual {ode:.2g}, inversion {inv:.2g}", scaled=True)


CHECKS: dict[int, Callable[[], CheckResult]] = {
    1: check_closed_forms,
    2: check_heat_residuals,
    3: check_stochastic_completeness,
    4: check_a_coefficients,
    5: check_wkb_scalar,
    6: check_descent,
    7: check_fourier,
    8: check_even_series,
    9: check_u1_trace,
    10: check_effective_actions,
    11: check_bitensor_identities,
    12: check_q_component,
}


def run_checks(indices=None) -> list[CheckResult]:
    """Run the selected checks (all by default) in index order."""
    chosen = sorted(CHECKS) if indices is None else sorted(set(indices))
    unknown = [i for i in chosen if i not in CHECKS]
    if unknown:
        raise ValueError(f"unknown check indices {unknown}")
    return [CHECKS[i]() for i in chosen]
