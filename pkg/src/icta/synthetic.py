"""Synthetic measurement generators for round-trip tests and demos."""
import numpy as np

from .calibration import LoadSpectrum, planck_occupancy
from .linewidth import SpectrumRecord, mixture_model


def linewidth_record(omega_j, background, lines, noise=0.0, seed=0, label="synthetic"):
    """Mixture PSD on ``omega_j`` with Gaussian noise of ``noise`` times the peak value."""
    y = mixture_model(omega_j, background, lines)
    if noise:
        rng = np.random.default_rng(seed)
        y = y + noise * np.max(np.abs(y)) * rng.standard_normal(y.size)
    return SpectrumRecord(omega_j, y, label=label)


def calibration_set(omega, device_gain, chain_gain, chain_noise, attenuation,
                    t_hot=1.0, t_cold=0.010, tone_gain=1.0, tone_power=1e-3):
    """Spectra a perfect setup would record for a quantum-limited device.

    Parameters
    ----------
    omega : ndarray
        Frequency grid (rad/s).
    device_gain : ndarray
        Power gain |g|^2 of the device in the on state.
    chain_gain, chain_noise : ndarray
        Noise-chain gain (units per photon) and added noise (photons) at the switch.
    attenuation : float
        One-way power transmission between switch and device.
    tone_gain : ndarray or float
        Arbitrary gain of the tone path (cancels in the referenced gain).

    Returns
    -------
    dict of LoadSpectrum keyed by label.
    """
    omega = np.asarray(omega, dtype=float)
    g2 = np.broadcast_to(np.asarray(device_gain, dtype=float), omega.shape)
    gc = np.broadcast_to(np.asarray(chain_gain, dtype=float), omega.shape)
    nc = np.broadcast_to(np.asarray(chain_noise, dtype=float), omega.shape)
    tone = tone_power * np.broadcast_to(np.asarray(tone_gain, dtype=float), omega.shape)
    n_hot = planck_occupancy(t_hot, omega)
    n_cold = planck_occupancy(t_cold, omega)
    device_noise = g2 - 1.0
    return {
        "hot": LoadSpectrum(omega, gc * (n_hot + nc), "hot", t_hot),
        "cold": LoadSpectrum(omega, gc * (n_cold + nc), "cold", t_cold),
        "short": LoadSpectrum(omega, tone.copy(), "short"),
        "device_off": LoadSpectrum(omega, tone * attenuation**2, "device_off"),
        "device_on": LoadSpectrum(omega, tone * attenuation**2 * g2, "device_on"),
        "device_superconducting": LoadSpectrum(omega, gc * (0.5 + nc), "device_superconducting"),
        "device_noise": LoadSpectrum(omega, gc * (0.5 + attenuation * device_noise + nc), "device_noise"),
    }
