import mpmath as mp
import numpy as np
import pytest

from hypheat.effaction import (
    ActionDecomposition,
    IRDivergenceError,
    direct_action_density,
    erf_erfc,
    h2_divergent_closed_form,
    h3_subtraction,
    scalar_h3_trace,
    upper_gamma_half,
    upper_gamma_int,
    w_even_decomposition,
    w_from_trace,
    w_h2_decomposition,
    w_h3_decomposition,
    w_h4_decomposition,
    w_odd_decomposition,
    w_odd_regular_density,
)
from hypheat.hypgeom import DimensionParams
from hypheat.u1gauge import ghost_subtracted_partition_trace

mp.mp.dps = 30


def mp_action(trace, cutoff):
    """``1/2 int_{cutoff^-2}^inf trace(t) dt/t`` at 30 digits."""
    eps = mp.mpf(cutoff) ** -2
    return float(mp.quad(lambda t: trace(t) / t, [eps, 1, 10, mp.inf]) / 2)


def mp_odd_trace(n, m):
    k = (n - 1) // 2
    poly = {3: [1], 5: [1, mp.mpf(2) / 3], 7: [1, 2, mp.mpf(16) / 15]}[n]
    return lambda t: (4 * mp.pi * t) ** (-mp.mpf(n) / 2) * mp.exp(-(k * k + m * m) * t) * sum(
        c * t**j for j, c in enumerate(poly))


@pytest.mark.parametrize("s", [1, 2, 3, 5])
@pytest.mark.parametrize("x", [1e-8, 1e-3, 0.5, 4.0, 40.0])
def test_upper_gamma_half(s, x):
    assert upper_gamma_half(s, x) == pytest.approx(float(mp.gammainc(mp.mpf(0.5) - s, x)), rel=1e-11)


@pytest.mark.parametrize("a", [-3, -1, 0, 1, 2])
@pytest.mark.parametrize("x", [1e-6, 0.3, 5.0])
def test_upper_gamma_int(a, x):
    assert upper_gamma_int(a, x) == pytest.approx(float(mp.gammainc(a, x)), rel=1e-11)


def test_special_function_errors():
    with pytest.raises(ValueError):
        upper_gamma_half(0, 1.0)
    with pytest.raises(ValueError):
        upper_gamma_half(2, 0.0)
    erf, erfc = erf_erfc(8.0)
    assert erf == 1.0 and erfc == pytest.approx(float(mp.erfc(8)), rel=1e-14)


@pytest.mark.parametrize("m", [0.0, 0.7])
@pytest.mark.parametrize("cutoff", [0.5, 3.0, 40.0])
def test_h3_total_against_direct_integral(m, cutoff):
    dec = w_h3_decomposition(m, cutoff)
    assert dec.total == pytest.approx(mp_action(mp_odd_trace(3, m), cutoff), rel=1e-12)
    b = np.sqrt(1 + m * m)
    assert dec.regular == pytest.approx(b**3 / (12 * np.pi) * float(mp.erfc(b / cutoff)), rel=1e-13)


@pytest.mark.parametrize("cutoff", [0.5, 3.0, 1e4])
def test_generic_odd_matches_h3(cutoff):
    a, b = w_odd_decomposition(DimensionParams(3), 0.4, cutoff), w_h3_decomposition(0.4, cutoff)
    assert a.divergent == pytest.approx(b.divergent, rel=1e-12)
    assert a.regular == pytest.approx(b.regular, rel=1e-12)


@pytest.mark.parametrize("n", [5, 7])
@pytest.mark.parametrize("cutoff", [1.0, 10.0])
def test_odd_total_against_direct_integral(n, cutoff):
    dec = w_odd_decomposition(DimensionParams(n), 0.3, cutoff)
    assert dec.total == pytest.approx(mp_action(mp_odd_trace(n, 0.3), cutoff), rel=1e-11)
    assert dec.total == pytest.approx(direct_action_density(DimensionParams(n), 0.3, cutoff), rel=1e-10)


def test_odd_regular_limit_by_analytic_continuation():
    # 1/2 (4 pi)^{-5/2} [Gamma(-5/2) b^5 + (2/3) Gamma(-3/2) b^3], b^2 = 4 + m^2
    m = 0.5
    b = np.sqrt(4 + m * m)
    ref = 0.5 * (4 * np.pi) ** -2.5 * (float(mp.gamma(-2.5)) * b**5 + 2 / 3 * float(mp.gamma(-1.5)) * b**3)
    assert w_odd_regular_density(DimensionParams(5), m) == pytest.approx(ref, rel=1e-14)
    dec = w_odd_decomposition(DimensionParams(5), m, 1e8)
    assert dec.regular == pytest.approx(ref, rel=1e-7)
    assert dec.regular_limit == pytest.approx(ref, rel=1e-14)


def test_h2_divergent_large_cutoff():
    # the closed form drops corrections of order log(cutoff) / cutoff^2
    for cutoff in (30.0, 100.0, 1000.0):
        dec = w_h2_decomposition(0.0, cutoff)
        err = abs(dec.divergent - h2_divergent_closed_form(0.0, cutoff))
        assert err < 0.05 * np.log(cutoff) / cutoff**2


@pytest.mark.parametrize("n,m", [(2, 0.0), (2, 0.6), (4, 0.0)])
@pytest.mark.parametrize("cutoff", [1.0, 3.0, 10.0])
def test_even_split_is_exact(n, m, cutoff):
    dec = w_even_decomposition(DimensionParams(n, m), m, cutoff)
    direct = direct_action_density(DimensionParams(n, m), m, cutoff)
    assert dec.total == pytest.approx(direct, rel=1e-9)


def test_even_regular_converges():
    a, b = w_h4_decomposition(0.0, 1e3), w_h4_decomposition(0.0, 1e4)
    assert abs(b.regular - b.regular_limit) < abs(a.regular - a.regular_limit) + 1e-15
    assert b.regular == pytest.approx(b.regular_limit, abs=1e-6)
    assert a.truncation_index is not None and a.series_estimate is not None


def test_from_trace_reproduces_h3():
    for cutoff in (1.0, 7.0, 100.0):
        ref = w_h3_decomposition(0.2, cutoff)
        dec = w_from_trace(scalar_h3_trace(0.2), cutoff, h3_subtraction(0.2), n=3, mass=0.2)
        assert dec.total == pytest.approx(ref.total, rel=1e-10)
    # the subtraction window [cutoff^-2, 1] is empty at cutoff 1
    assert w_from_trace(scalar_h3_trace(), 1.0, h3_subtraction()).divergent == 0.0


def test_ghost_subtracted_action():
    p = DimensionParams(3)

    def exact(t):
        return (2 + 4 * t - mp.exp(-t)) * (4 * mp.pi * t) ** mp.mpf(-1.5)

    c = (4 * np.pi) ** -1.5
    sub = [(-1.5, c), (-0.5, 5 * c)]
    dec = w_from_trace(lambda t: ghost_subtracted_partition_trace(p, 0.0, t), 10.0, sub, n=3)
    assert dec.total == pytest.approx(mp_action(exact, 10.0), rel=1e-10)


def test_from_trace_errors():
    with pytest.raises(IRDivergenceError):
        w_from_trace(lambda t: 1.0, 2.0, [(0.0, 1.0)])
    with pytest.raises(ValueError):
        w_from_trace(scalar_h3_trace(), 2.0, [])
    with pytest.raises(ValueError):
        w_from_trace(scalar_h3_trace(), 2.0, [(0.5, 1.0)])
    for bad in (0.0, -1.0, np.inf):
        with pytest.raises(ValueError):
            w_h3_decomposition(0.0, bad)
    with pytest.raises(ValueError):
        w_odd_decomposition(DimensionParams(4), 0.0, 1.0)
    with pytest.raises(ValueError):
        w_even_decomposition(DimensionParams(3), 0.0, 1.0)


def test_decomposition_total():
    dec = ActionDecomposition(3, 0.0, 2.0, 1.5, -0.25)
    assert dec.total == 1.25 and dec.regular_limit is None


def test_zero_trace_gives_zero_action():
    dec = w_from_trace(lambda t: 0.0, 5.0)
    assert (dec.divergent, dec.regular) == (0.0, 0.0)

