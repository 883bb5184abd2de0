import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from icta.bias_noise import fwhm_from_thermal
from icta.constants import mhz_to_rad, rad_to_mhz
from icta.errors import DomainError, SeedingError
from icta.linewidth import FittedLine, SpectrumRecord, effective_temperature, fit_mixture, seed_parameters
from icta.synthetic import linewidth_record

NOMINAL = mhz_to_rad(9000.0)


def grid(half_span_mhz=300.0, n=601):
    return NOMINAL + mhz_to_rad(np.linspace(-half_span_mhz, half_span_mhz, n))


def line(amp, center_mhz, fwhm_mhz):
    return FittedLine(amp, NOMINAL + mhz_to_rad(center_mhz), mhz_to_rad(fwhm_mhz))


MEDIUM_TRUTH = [line(0.5, -48, 45.8), line(1.0, 0, 28.5), line(0.5, 48, 45.8)]


def test_record_validation():
    with pytest.raises(DomainError):
        SpectrumRecord(np.arange(5.0), np.ones(5))
    with pytest.raises(DomainError):
        SpectrumRecord(np.array([0, 1, 2, 3, 3, 5, 6, 7.0]), np.ones(8))
    with pytest.raises(DomainError):
        SpectrumRecord(np.arange(8.0), np.r_[np.ones(7), np.nan])


def test_single_line_noise_free():
    rec = linewidth_record(grid(60, 241), 0.1, [line(2.0, 3.0, 5.6)])
    fit = fit_mixture(rec, 1)
    assert fit.converged
    assert rad_to_mhz(fit.lines[0].fwhm) == pytest.approx(5.6, rel=1e-3)
    assert fit.background == pytest.approx(0.1, rel=1e-6)


def test_three_line_mixture_with_noise():
    rec = linewidth_record(grid(), 0.2, MEDIUM_TRUTH, noise=0.01, seed=3)
    fit = fit_mixture(rec, 3)
    for got, want in zip(fit.lines, MEDIUM_TRUTH):
        assert abs(rad_to_mhz(got.center - want.center)) < 1.0
        assert got.fwhm == pytest.approx(want.fwhm, rel=0.10)


def test_symmetric_constraint():
    rec = linewidth_record(grid(), 0.2, MEDIUM_TRUTH, noise=0.01, seed=4)
    fit = fit_mixture(rec, 3, symmetric=True)
    left, mid, right = fit.lines
    assert left.fwhm == pytest.approx(right.fwhm, rel=1e-12)
    assert left.amplitude == pytest.approx(right.amplitude, rel=1e-12)
    assert mid.center - left.center == pytest.approx(right.center - mid.center, rel=1e-9)


def test_zero_components_rejected():
    rec = linewidth_record(grid(60, 241), 0.1, [line(2.0, 0.0, 5.6)])
    with pytest.raises(DomainError):
        fit_mixture(rec, 0)


def test_seed_single_peak_at_argmax():
    rec = linewidth_record(grid(60, 241), 0.1, [line(2.0, 7.0, 5.6)])
    bg, lines = seed_parameters(rec, 1)
    assert bg == pytest.approx(np.min(rec.psd))
    assert lines[0][1] == rec.omega_j[np.argmax(rec.psd)]
    assert lines[0][2] >= 2 * np.min(np.diff(rec.omega_j))


def test_seed_three_distinct_peaks():
    truth = [line(1.0, -100, 10), line(1.0, 0, 10), line(1.0, 100, 10)]
    _, lines = seed_parameters(linewidth_record(grid(), 0.0, truth), 3)
    centers = [c for _, c, _ in lines]
    assert len(set(centers)) == 3
    assert centers == sorted(centers)


def test_seed_flat_data_rejected():
    with pytest.raises(SeedingError):
        seed_parameters(SpectrumRecord(grid(10, 50), np.ones(50)), 1)


def test_seed_too_many_components_suggests_fewer():
    rec = linewidth_record(grid(60, 241), 0.1, [line(2.0, 0.0, 5.6)])
    with pytest.raises(SeedingError, match="fewer"):
        seed_parameters(rec, 3)


def test_cost_history_is_monotone():
    rec = linewidth_record(grid(), 0.2, MEDIUM_TRUTH, noise=0.02, seed=8)
    fit = fit_mixture(rec, 3)
    hist = np.array(fit.cost_history)
    assert np.all(np.diff(hist) <= 0)


def test_uncertainties_shrink_with_noise():
    errs = []
    for noise in (0.01, 0.001):
        rec = linewidth_record(grid(60, 241), 0.1, [line(2.0, 0.0, 5.6)], noise=noise, seed=1)
        errs.append(fit_mixture(rec, 1).lines[0].fwhm_err)
    assert errs[1] < errs[0]
    assert all(np.isfinite(errs))


def test_to_distribution_uses_areas():
    truth = [line(1.0, -50, 10), line(1.0, 50, 30)]
    fit = fit_mixture(linewidth_record(grid(), 0.0, truth), 2)
    dist = fit.to_distribution(nominal=NOMINAL)
    w = [c.weight for c in dist.components]
    assert sum(w) == pytest.approx(1.0, abs=1e-12)
    assert w[1] / w[0] == pytest.approx(3.0, rel=1e-6)
    assert dist.components[0].center == pytest.approx(mhz_to_rad(-50), rel=1e-6)


@pytest.mark.parametrize("fwhm_mhz, z, t_mk", [(5.6, 5.0, 27.6), (73.8, 50.0, 36.4)])
def test_effective_temperature(fwhm_mhz, z, t_mk):
    assert effective_temperature(mhz_to_rad(fwhm_mhz), z) * 1e3 == pytest.approx(t_mk, rel=0.01)


def test_effective_temperature_edges():
    assert effective_temperature(0.0, 5.0) == 0.0
    with pytest.raises(DomainError):
        effective_temperature(1.0, 0.0)


@given(st.floats(1e-4, 10.0), st.floats(0.1, 1e3))
def test_temperature_inverse(t, z):
    w = fwhm_from_thermal(t, z)
    assert fwhm_from_thermal(effective_temperature(w, z), z) == pytest.approx(w, rel=1e-12)


@st.composite
def mixtures(draw):
    """Resolvable mixtures: every line is a distinct local maximum of the PSD."""
    n = draw(st.integers(1, 3))
    centers = np.sort(draw(st.lists(st.floats(-150, 150), min_size=n, max_size=n)))
    if n > 1 and np.min(np.diff(centers)) < 60:
        centers = np.linspace(-120, 120, n)
    lines = [
        line(draw(st.floats(1.0, 5.0)), float(c), draw(st.floats(4.0, 40.0)))
        for c in centers
    ]
    return draw(st.floats(0.0, 1.0)), lines


@settings(max_examples=100, deadline=None)
@given(mixtures())
def test_noise_free_round_trip(case):
    bg, truth = case
    fit = fit_mixture(linewidth_record(grid(300, 1201), bg, truth), len(truth))
    for got, want in zip(fit.lines, truth):
        assert got.amplitude == pytest.approx(want.amplitude, rel=1e-3)
        assert abs(got.center - want.center) <= 1e-3 * want.fwhm
        assert got.fwhm == pytest.approx(want.fwhm, rel=1e-3)
