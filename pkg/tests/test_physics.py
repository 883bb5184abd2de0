import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import brentq

from icta.constants import CODATA2018, energy_to_mhz, mhz_to_energy, mhz_to_rad, rad_to_mhz
from icta.errors import DivergenceError, DomainError
from icta.physics import (
    BiasPoint,
    Detunings,
    DeviceParams,
    amplitude_gain,
    bandwidth_analytic,
    coupling_xi,
    detunings,
    ej_critical,
    kappa_eff_signal,
    lorentzian_gain_approx,
    max_gain,
    xi_for_max_gain,
    zero_point_phase,
)

from conftest import make_device


def test_constants_are_exact_si_values():
    c = CODATA2018
    assert c.e == 1.602176634e-19
    assert c.h == 6.62607015e-34
    assert c.k_B == 1.380649e-23
    assert 2 * math.pi * c.hbar == c.h


def test_unit_round_trip():
    f = np.array([0.1, 4800.0, 10952.0])
    np.testing.assert_allclose(rad_to_mhz(mhz_to_rad(f)), f, rtol=1e-15)
    assert mhz_to_rad(1.0) == pytest.approx(2 * math.pi * 1e6, rel=1e-15)
    assert energy_to_mhz(mhz_to_energy(760.0)) == pytest.approx(760.0, rel=1e-15)


@pytest.mark.parametrize("z, expected", [(400.0, 0.44), (0.0, 0.0)])
def test_zero_point_phase_values(z, expected):
    assert round(zero_point_phase(z), 2) == expected


def test_zero_point_phase_monotone_and_rejects_negative():
    z = np.linspace(0, 1000, 50)
    assert np.all(np.diff(zero_point_phase(z)) > 0)
    with pytest.raises(DomainError):
        zero_point_phase(-1.0)


def test_bias_point_voltage_round_trip():
    bp = BiasPoint(mhz_to_rad(10952.0))
    assert BiasPoint.from_voltage(bp.voltage).omega_j == pytest.approx(bp.omega_j, rel=1e-14)
    with pytest.raises(DomainError):
        BiasPoint(0.0)


def test_device_validation():
    with pytest.raises(DomainError):
        make_device(w_s=0.0)
    with pytest.raises(DomainError):
        DeviceParams(1.0, 2.0, 1.0, 1.0, 50.0, 50.0, degenerate=True)


def test_xi_critical_and_linearity(sample_a):
    ejc = ej_critical(sample_a)
    assert coupling_xi(sample_a.with_ej(ejc)) == pytest.approx(1.0, rel=1e-12)
    assert coupling_xi(sample_a.with_ej(0.0)) == 0.0
    # half the Josephson energy, half the pump strength; cross-checked against lambda
    half = sample_a.with_ej(mhz_to_energy(380.0))
    lam = half.coupling_rate
    direct = 2 * lam / math.sqrt(half.kappa_s * half.kappa_i)
    assert coupling_xi(half) == pytest.approx(direct, rel=1e-14)
    assert coupling_xi(half) == pytest.approx(380.0 / energy_to_mhz(ejc), rel=1e-12)
    assert coupling_xi(half) == pytest.approx(0.5, rel=0.01)


def test_ej_critical_sample_a(sample_a):
    assert energy_to_mhz(ej_critical(sample_a)) == pytest.approx(760.0, rel=0.01)


def test_ej_critical_symmetric_reduction():
    dev = DeviceParams.single_mode(mhz_to_rad(5000.0), mhz_to_rad(100.0), 60.0)
    phi = zero_point_phase(60.0)
    assert ej_critical(dev) == pytest.approx(CODATA2018.hbar * dev.kappa_s / phi**2, rel=1e-14)


def test_detunings_examples():
    dev = make_device(f_i=6181.0)
    d = detunings(mhz_to_rad(4771.0), BiasPoint(mhz_to_rad(10952.0)), dev)
    assert rad_to_mhz(d.signal) == pytest.approx(-29.0, abs=1e-9)
    assert rad_to_mhz(d.idler) == pytest.approx(0.0, abs=1e-9)
    d0 = detunings(dev.omega_s, dev.optimal_bias, dev)
    assert (d0.signal, d0.idler) == (0.0, 0.0)
    x = mhz_to_rad(3.3)
    dx = detunings(dev.omega_s + x, dev.optimal_bias, dev)
    assert dx.signal == pytest.approx(x, rel=1e-9)
    assert dx.idler == pytest.approx(-x, rel=1e-9)


def test_gain_zero_coupling_is_pure_phase(sample_a):
    d = np.linspace(-500, 500, 41)
    g = amplitude_gain(Detunings(mhz_to_rad(d), mhz_to_rad(d[::-1] * 0.7)), 0.0, sample_a)
    np.testing.assert_allclose(np.abs(g), 1.0, rtol=1e-14)


@pytest.mark.parametrize("xi2, g", [(0.5, 3.0), (0.9, 19.0), (0.98, 99.0)])
def test_gain_at_resonance(sample_a, xi2, g):
    xi = math.sqrt(xi2)
    assert amplitude_gain(Detunings(0.0, 0.0), xi, sample_a) == pytest.approx(g, rel=1e-12)
    assert max_gain(xi) == pytest.approx(g, rel=1e-12)


def test_max_gain_exact_half():
    assert max_gain(math.sqrt(0.5)) == pytest.approx(3.0, rel=1e-15)
    assert max_gain(0.0) == 1.0
    assert 20 * math.log10(max_gain(math.sqrt(0.9))) == pytest.approx(25.575, abs=1e-3)
    assert max_gain(xi_squared=0.5) == 3.0


@pytest.mark.parametrize("kwargs", [{}, {"xi": 0.5, "xi_squared": 0.25}])
def test_max_gain_needs_one_argument(kwargs):
    with pytest.raises(TypeError):
        max_gain(**kwargs)


@pytest.mark.parametrize("x2, exc", [(1.0, DivergenceError), (-0.1, DomainError), (float("nan"), DomainError)])
def test_max_gain_squared_domain(x2, exc):
    with pytest.raises(exc):
        max_gain(xi_squared=x2)


def test_max_gain_matches_amplitude_gain_random(sample_a, rng):
    for xi in rng.uniform(0, 0.999, 100):
        g = amplitude_gain(Detunings(0.0, 0.0), xi, sample_a)
        assert abs(g) == pytest.approx(max_gain(xi), rel=1e-12)


@pytest.mark.parametrize("xi", [1.0, 1.5])
def test_divergence_rejected(sample_a, xi):
    with pytest.raises(DivergenceError):
        amplitude_gain(Detunings(0.0, 0.0), xi, sample_a)
    with pytest.raises(DivergenceError):
        max_gain(xi)


def test_negative_xi_rejected(sample_a):
    with pytest.raises(DomainError):
        amplitude_gain(Detunings(0.0, 0.0), -0.1, sample_a)


@settings(max_examples=200, deadline=None)
@given(delta=st.floats(-2e9, 2e9), xi=st.floats(0.0, 0.999))
def test_conjugate_pair_symmetry(delta, xi):
    dev = make_device()
    a = amplitude_gain(Detunings(delta, -delta), xi, dev)
    b = amplitude_gain(Detunings(-delta, delta), xi, dev)
    assert abs(a) == pytest.approx(abs(b), rel=1e-12)


@settings(max_examples=200, deadline=None)
@given(delta=st.floats(-5e9, 5e9), xi=st.floats(0.0, 0.9999))
def test_quantum_limit_nonnegative_on_resonant_signal(delta, xi):
    dev = make_device()
    g = amplitude_gain(Detunings(0.0, delta), xi, dev)
    assert abs(g) ** 2 - 1 >= -1e-12
    g2 = amplitude_gain(Detunings(delta, 0.0), xi, dev)
    assert abs(g2) >= 1 - 1e-12


def test_gain_can_dip_below_unity_for_mixed_detunings(sample_a):
    # no global |g| >= 1 guarantee off the resonant slices; just ensure finite values
    d_s = mhz_to_rad(np.linspace(-300, 300, 61))
    d_i = mhz_to_rad(np.linspace(200, -400, 61))
    g = amplitude_gain(Detunings(d_s[:, None], d_i[None, :]), 0.9, sample_a)
    assert np.all(np.isfinite(g))


def test_lorentzian_approx_identities():
    k = mhz_to_rad(67.4)
    assert lorentzian_gain_approx(0.0, k, 10.0) == pytest.approx(10.0)
    assert abs(lorentzian_gain_approx(k / 10.0, k, 10.0)) == pytest.approx(10 / math.sqrt(2), rel=1e-14)
    assert abs(lorentzian_gain_approx(mhz_to_rad(6.74), k, 10.0)) == pytest.approx(7.0711, abs=1e-4)


def test_lorentzian_approx_close_to_exact_near_high_gain(sample_a):
    g0 = 10.0
    xi = xi_for_max_gain(g0)
    k = kappa_eff_signal(sample_a)
    delta = mhz_to_rad(6.74)
    exact = abs(amplitude_gain(Detunings(delta, -delta), xi, sample_a))
    approx = abs(lorentzian_gain_approx(delta, k, g0))
    assert exact == pytest.approx(approx, rel=0.10)


def _band_error(dev, xi):
    g0 = max_gain(xi)
    k = kappa_eff_signal(dev)
    d = np.linspace(-1, 1, 2001) * k / g0
    exact = np.abs(amplitude_gain(Detunings(d, -d), xi, dev))
    approx = np.abs(lorentzian_gain_approx(d, k, g0))
    return np.max(np.abs(exact - approx) / exact)


def test_lorentzian_approx_converges(sample_a):
    errs = [_band_error(sample_a, xi) for xi in (0.9, 0.99, 0.999)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-3


def test_bandwidth_analytic(sample_a):
    assert rad_to_mhz(kappa_eff_signal(sample_a)) == pytest.approx(67.38, abs=0.01)
    assert rad_to_mhz(bandwidth_analytic(sample_a, 10.0)) == pytest.approx(13.48, abs=0.01)
    assert bandwidth_analytic(sample_a, 20.0) == pytest.approx(bandwidth_analytic(sample_a, 10.0) / 2)
    sym = DeviceParams.single_mode(mhz_to_rad(4450.0), mhz_to_rad(185.0), 80.0)
    assert bandwidth_analytic(sym, 7.0) == pytest.approx(sym.kappa_s / 7.0, rel=1e-14)
    with pytest.raises(DomainError):
        bandwidth_analytic(sample_a, 1.0)


def signal_3db_width(dev, xi):
    """Full width of |g|^2 >= g0^2/2 at optimal bias, by root finding on the exact gain."""
    g0 = max_gain(xi)

    def f(d):
        return abs(amplitude_gain(Detunings(d, -d), xi, dev)) ** 2 - g0**2 / 2

    guess = kappa_eff_signal(dev) / g0
    hi = brentq(f, 0.0, 20 * guess, xtol=1e-6)
    lo = brentq(f, -20 * guess, 0.0, xtol=1e-6)
    return hi - lo


def test_gain_bandwidth_product_property(sample_a):
    gbp = []
    for g0 in np.geomspace(10, 100, 7):
        xi = xi_for_max_gain(g0)
        gbp.append(signal_3db_width(sample_a, xi) * g0)
    gbp = np.array(gbp)
    assert np.ptp(gbp) / np.mean(gbp) < 0.05
    np.testing.assert_allclose(gbp, 2 * kappa_eff_signal(sample_a), rtol=0.10)
