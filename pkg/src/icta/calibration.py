"""Readout-chain calibration: Y-factor, line loss, on/off gain and output noise.

Noise bookkeeping is in photons per mode at each frequency, with the vacuum
half-photon included in the load occupancy. A spectrum measured with a load
of occupancy ``n`` at the switch reads ``P = G_chain (n + N_sys)``.
"""
from dataclasses import dataclass
import math
import warnings

import numpy as np

from .constants import hbar, k_B
from .errors import CalibrationError, DomainError, GridMismatchError

LABELS = (
    "hot", "cold", "short", "device_on", "device_off",
    "device_noise", "device_superconducting",
)

NEGATIVE_NOISE_LIMIT = -0.05


def planck_occupancy(temperature, omega):
    """Mean photon number of a thermal mode including the vacuum half photon.

    ``1 / (exp(hbar omega / k_B T) - 1) + 1/2``; exactly 1/2 at T = 0.
    """
    t = np.asarray(temperature, dtype=float)
    w = np.asarray(omega, dtype=float)
    if np.any(t < 0):
        raise DomainError("temperature must be >= 0")
    if np.any(w <= 0):
        raise DomainError("frequency must be > 0")
    with np.errstate(divide="ignore", over="ignore"):
        x = np.where(t > 0, hbar * w / (k_B * np.where(t > 0, t, 1.0)), np.inf)
        n = 0.5 / np.tanh(0.5 * x)
    n = np.where(np.isinf(x), 0.5, n)
    return float(n) if n.ndim == 0 else n


@dataclass(frozen=True)
class LoadSpectrum:
    """Power measured on a frequency grid (rad/s) with the switch in one position.

    ``temperature`` is only meaningful for the ``hot`` and ``cold`` loads.
    """

    omega: np.ndarray
    power: np.ndarray
    label: str
    temperature: float = float("nan")

    def __post_init__(self):
        w = np.asarray(self.omega, dtype=float)
        p = np.asarray(self.power, dtype=float)
        object.__setattr__(self, "omega", w)
        object.__setattr__(self, "power", p)
        if self.label not in LABELS:
            raise DomainError(f"unknown spectrum label {self.label!r}")
        if w.ndim != 1 or w.shape != p.shape or w.size == 0:
            raise DomainError("omega and power must be non-empty 1-D arrays of equal length")
        if np.any(w <= 0):
            raise DomainError("frequencies must be > 0")
        if not np.all(np.isfinite(p)):
            raise DomainError(f"{self.label}: power values must be finite")
        if self.label in ("hot", "cold") and not self.temperature > 0:
            raise DomainError(f"{self.label} load needs a positive temperature")


@dataclass(frozen=True)
class CalibrationChain:
    """Readout chain referred to the microwave switch.

    Attributes
    ----------
    omega : ndarray
        Frequency grid (rad/s).
    gain : ndarray
        Digitizer units per photon from the switch onwards.
    noise : ndarray
        Chain noise referred to the switch (photons).
    attenuation : float
        One-way power transmission of the switch-to-device line, 0 < A <= 1.
    """

    omega: np.ndarray
    gain: np.ndarray
    noise: np.ndarray
    attenuation: float = 1.0

    def __post_init__(self):
        if np.any(self.gain <= 0):
            raise CalibrationError("chain gain must be positive")
        if not 0 < self.attenuation <= 1:
            raise CalibrationError(f"attenuation must lie in (0, 1], got {self.attenuation!r}")

    @property
    def band(self):
        return float(self.omega[0]), float(self.omega[-1])

    def with_attenuation(self, attenuation):
        return CalibrationChain(self.omega, self.gain, self.noise, attenuation)


def _same_grid(*spectra):
    ref = spectra[0]
    for s in spectra[1:]:
        if s.omega.shape != ref.omega.shape or not np.array_equal(s.omega, ref.omega):
            raise GridMismatchError(f"frequency grids of {ref.label!r} and {s.label!r} differ")


def y_factor(hot, cold):
    """Chain gain and noise from hot and cold matched loads.

    Exact inversion of ``P = G (n(T, omega) + N_sys)`` at each frequency.
    """
    _same_grid(hot, cold)
    if not hot.temperature > cold.temperature:
        raise CalibrationError(
            f"hot load temperature {hot.temperature} K must exceed cold {cold.temperature} K"
        )
    n_hot = planck_occupancy(hot.temperature, hot.omega)
    n_cold = planck_occupancy(cold.temperature, cold.omega)
    bad = np.nonzero(hot.power <= cold.power)[0]
    if bad.size:
        f_mhz = hot.omega[bad[0]] / (2 * math.pi * 1e6)
        raise CalibrationError(f"hot power does not exceed cold power at {f_mhz:.6g} MHz")
    gain = (hot.power - cold.power) / (n_hot - n_cold)
    noise = cold.power / gain - n_cold
    return CalibrationChain(hot.omega.copy(), gain, noise)


@dataclass(frozen=True)
class AttenuationResult:
    per_frequency: np.ndarray
    linear: float
    db: float
    max_deviation_db: float
    flat: bool
    warning: str = None


def line_attenuation(gain_to_device, gain_to_switch, flatness_db=0.2):
    """One-way loss between switch and device from two gain calibrations.

    The round trip to the device sees the line twice, so the one-way power
    transmission is the square root of the ratio of the two gains. The band
    mean is returned; a ripple larger than ``flatness_db`` only produces a
    warning.

    Parameters
    ----------
    gain_to_device, gain_to_switch : array_like
        Linear power gains measured with reflection at the device (off
        state) and at a short on the switch.
    """
    dev = np.asarray(gain_to_device, dtype=float)
    sw = np.asarray(gain_to_switch, dtype=float)
    if dev.shape != sw.shape:
        raise GridMismatchError("gain calibrations have different lengths")
    if np.any(sw <= 0) or np.any(dev <= 0):
        raise DomainError("gains must be positive")
    a = np.sqrt(dev / sw)
    a_db = -10.0 * np.log10(a)
    mean_db = float(np.mean(a_db))
    dev_db = float(np.max(np.abs(a_db - mean_db)))
    flat = dev_db < flatness_db
    message = None
    if not flat:
        message = f"line loss varies by {dev_db:.3f} dB across the band (limit {flatness_db} dB)"
        warnings.warn(message, RuntimeWarning, stacklevel=2)
    return AttenuationResult(a, 10.0 ** (-mean_db / 10.0), mean_db, dev_db, flat, message)


def referenced_gain(on, off):
    """Device power gain as the ratio of on-state to off-state transmission."""
    _same_grid(on, off)
    if np.any(off.power <= 0):
        raise CalibrationError("off-state power must be positive")
    return on.power / off.power


def device_output_noise(on, superconducting, chain):
    """Output noise of the device in photons.

    The superconducting-state spectrum (no emission) is subtracted from the
    on-state noise spectrum; the remainder is referred back through the chain
    gain and the one-way line transmission. Slightly negative values from
    measurement scatter are clipped to zero with a warning.
    """
    _same_grid(on, superconducting)
    if on.omega.shape != chain.omega.shape or not np.array_equal(on.omega, chain.omega):
        raise GridMismatchError("device spectra and chain calibration use different grids")
    noise = (on.power - superconducting.power) / (chain.gain * chain.attenuation)
    if np.any(noise < NEGATIVE_NOISE_LIMIT):
        k = int(np.argmin(noise))
        raise CalibrationError(
            f"output noise {noise[k]:.3g} photons below {NEGATIVE_NOISE_LIMIT} "
            f"at {on.omega[k] / (2 * math.pi * 1e6):.6g} MHz"
        )
    if np.any(noise < 0):
        warnings.warn("small negative output noise clipped to zero", RuntimeWarning, stacklevel=2)
        noise = np.clip(noise, 0.0, None)
    return noise


def noise_ratio(output_noise, gain):
    """Output noise over the quantum limit ``G - 1``; NaN where ``G <= 1``."""
    n = np.asarray(output_noise, dtype=float)
    g = np.asarray(gain, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(g > 1.0, n / (g - 1.0), np.nan)
    return float(r) if r.ndim == 0 else r


@dataclass(frozen=True)
class CalibratedDevice:
    chain: CalibrationChain
    attenuation: AttenuationResult
    gain: np.ndarray
    output_noise: np.ndarray
    noise_ratio: np.ndarray


def calibrate(hot, cold, short, device_on, device_off, device_noise, device_sc, flatness_db=0.2):
    """Full pipeline: Y-factor, line loss, referenced gain, output noise, noise ratio.

    Errors are re-raised with the failing stage prefixed to the message.
    """
    def stage(name, fn, *args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (CalibrationError, DomainError) as exc:
            raise type(exc)(f"[{name}] {exc}") from exc

    stage("grid", _same_grid, hot, cold, short, device_on, device_off, device_noise, device_sc)
    chain = stage("y_factor", y_factor, hot, cold)
    att = stage("line_attenuation", line_attenuation, device_off.power, short.power, flatness_db)
    chain = chain.with_attenuation(att.linear)
    gain = stage("referenced_gain", referenced_gain, device_on, device_off)
    noise = stage("output_noise", device_output_noise, device_noise, device_sc, chain)
    return CalibratedDevice(chain, att, gain, noise, noise_ratio(noise, gain))
