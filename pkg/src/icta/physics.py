"""Device parameterisation and the ideal parametric gain model.

The junction is biased at Josephson frequency ``omega_J = 2 e V / hbar`` and
couples a signal mode and an idler mode. After eliminating the cavity modes
with input-output theory the reflection amplitude gain is

    g = (tau_S tau_I + Xi^2) / (conj(tau_S) tau_I - Xi^2),
    tau_x = 1 + 2 i Delta_x / kappa_x,

with signal detuning ``Delta_S = omega_in - omega_S`` and idler detuning
``Delta_I = omega_J - omega_in - omega_I``.
"""
from dataclasses import dataclass
import math

import numpy as np

from .constants import CODATA2018, e, h, hbar
from .errors import DivergenceError, DomainError


def zero_point_phase(impedance):
    """Zero-point phase fluctuation of a mode with characteristic impedance ``Z``.

    ``phi = sqrt(pi * (4 e^2 / h) * Z)``
    """
    z = np.asarray(impedance, dtype=float)
    if np.any(z < 0):
        raise DomainError(f"impedance must be non-negative, got {impedance!r}")
    phi = np.sqrt(math.pi * (4.0 * e**2 / h) * z)
    return float(phi) if phi.ndim == 0 else phi


@dataclass(frozen=True)
class DeviceParams:
    """Two-mode ICTA device.

    Attributes
    ----------
    omega_s, omega_i : float
        Signal and idler mode frequencies (rad/s).
    kappa_s, kappa_i : float
        Signal and idler energy decay rates (rad/s).
    z_s, z_i : float
        Characteristic impedances of the modes (ohm).
    e_j : float
        Josephson energy (J). Zero is allowed (no coupling).
    degenerate : bool
        Signal and idler live in the same physical mode.
    """

    omega_s: float
    omega_i: float
    kappa_s: float
    kappa_i: float
    z_s: float
    z_i: float
    e_j: float = 0.0
    degenerate: bool = False

    def __post_init__(self):
        for name in ("omega_s", "omega_i", "kappa_s", "kappa_i", "z_s", "z_i"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be finite and > 0, got {value!r}")
        if not (np.isfinite(self.e_j) and self.e_j >= 0):
            raise DomainError(f"e_j must be finite and >= 0, got {self.e_j!r}")
        if self.degenerate and not (
            self.omega_s == self.omega_i
            and self.kappa_s == self.kappa_i
            and self.z_s == self.z_i
        ):
            raise DomainError("degenerate device requires identical signal and idler parameters")

    @classmethod
    def single_mode(cls, omega, kappa, z, e_j=0.0):
        """Degenerate device where signal and idler share one resonance."""
        return cls(omega, omega, kappa, kappa, z, z, e_j, degenerate=True)

    @property
    def phi_s(self):
        return zero_point_phase(self.z_s)

    @property
    def phi_i(self):
        return zero_point_phase(self.z_i)

    @property
    def coupling_rate(self):
        """lambda = E_J phi_S phi_I / (2 hbar), in rad/s."""
        return self.e_j * self.phi_s * self.phi_i / (2.0 * hbar)

    @property
    def xi(self):
        return coupling_xi(self)

    @property
    def optimal_bias(self):
        """Josephson frequency at which both modes are resonant (rad/s)."""
        return self.omega_s + self.omega_i

    def with_ej(self, e_j):
        return DeviceParams(
            self.omega_s, self.omega_i, self.kappa_s, self.kappa_i,
            self.z_s, self.z_i, e_j, self.degenerate,
        )

    def with_xi(self, xi):
        """Copy of the device with E_J chosen so that the pump strength equals ``xi``."""
        if xi < 0:
            raise DomainError(f"Xi must be >= 0, got {xi!r}")
        return self.with_ej(xi * ej_critical(self))

    def shifted(self, d_omega_i):
        """Copy with the idler frequency shifted by ``d_omega_i`` (non-degenerate only)."""
        return DeviceParams(
            self.omega_s, self.omega_i + d_omega_i, self.kappa_s, self.kappa_i,
            self.z_s, self.z_i, self.e_j, False,
        )


@dataclass(frozen=True)
class BiasPoint:
    """DC operating point, stored as the Josephson frequency (rad/s)."""

    omega_j: float

    def __post_init__(self):
        if not self.omega_j > 0:
            raise DomainError(f"Josephson frequency must be > 0, got {self.omega_j!r}")

    @classmethod
    def from_voltage(cls, voltage):
        return cls(2.0 * CODATA2018.e * voltage / CODATA2018.hbar)

    @property
    def voltage(self):
        return self.omega_j * CODATA2018.hbar / (2.0 * CODATA2018.e)


@dataclass(frozen=True)
class Detunings:
    """Signal and idler detunings (rad/s); scalars or broadcastable arrays."""

    signal: object
    idler: object


def coupling_xi(params):
    """Dimensionless pump strength Xi = 2 lambda / sqrt(kappa_S kappa_I).

    Returned even when >= 1; callers decide whether that is acceptable.
    """
    return params.e_j * params.phi_s * params.phi_i / (hbar * math.sqrt(params.kappa_s * params.kappa_i))


def ej_critical(params):
    """Josephson energy (J) at which the gain diverges, Xi = 1. ``params.e_j`` is ignored."""
    return hbar * math.sqrt(params.kappa_s * params.kappa_i) / (params.phi_s * params.phi_i)


def detunings(omega_in, bias, params):
    """Detunings for signal frequency ``omega_in`` at operating point ``bias``."""
    omega_j = bias.omega_j if isinstance(bias, BiasPoint) else bias
    omega_in = np.asarray(omega_in, dtype=float)
    return Detunings(omega_in - params.omega_s, omega_j - omega_in - params.omega_i)


def _check_xi(xi):
    if not np.isfinite(xi) or xi < 0:
        raise DomainError(f"Xi must be finite and >= 0, got {xi!r}")
    if xi >= 1:
        raise DivergenceError(f"Xi = {xi!r} >= 1: parametric gain diverges")


def amplitude_gain(det, xi, params):
    """Complex reflection amplitude gain for the given detunings.

    Parameters
    ----------
    det : Detunings
        Signal and idler detunings in rad/s (arrays broadcast).
    xi : float
        Pump strength, 0 <= xi < 1.
    params : DeviceParams
        Supplies the two linewidths.

    Returns
    -------
    complex or ndarray of complex
    """
    _check_xi(xi)
    tau_s = 1.0 + 2j * np.asarray(det.signal, dtype=float) / params.kappa_s
    tau_i = 1.0 + 2j * np.asarray(det.idler, dtype=float) / params.kappa_i
    x2 = xi * xi
    g = (tau_s * tau_i + x2) / (np.conj(tau_s) * tau_i - x2)
    return complex(g) if np.ndim(g) == 0 else g


def max_gain(xi=None, *, xi_squared=None):
    """Peak amplitude gain (1 + Xi^2) / (1 - Xi^2), reached at zero detunings.

    Give either ``xi`` or ``xi_squared``; the latter avoids the rounding of
    squaring a square root (``max_gain(xi_squared=0.5)`` is exactly 3).
    """
    if (xi is None) == (xi_squared is None):
        raise TypeError("give exactly one of xi and xi_squared")
    if xi_squared is None:
        _check_xi(xi)
        x2 = xi * xi
    else:
        if not 0 <= xi_squared:
            raise DomainError(f"Xi^2 must be finite and >= 0, got {xi_squared!r}")
        _check_xi(math.sqrt(xi_squared))
        x2 = float(xi_squared)
    return (1.0 + x2) / (1.0 - x2)


def xi_for_max_gain(g0):
    """Inverse of :func:`max_gain`."""
    if g0 < 1:
        raise DomainError(f"peak amplitude gain must be >= 1, got {g0!r}")
    return math.sqrt((g0 - 1.0) / (g0 + 1.0))


def kappa_eff_signal(params):
    """Effective width for signal sweeps at optimal bias: 1/k = 1/k_S + 1/k_I."""
    return 1.0 / (1.0 / params.kappa_s + 1.0 / params.kappa_i)


def kappa_eff_bias(params):
    """Effective width for bias sweeps with the signal held on resonance: the idler width."""
    return params.kappa_i


def lorentzian_gain_approx(delta, kappa_eff, g0):
    """High-gain Lorentzian form g0 / (1 - i g0 delta / kappa_eff).

    ``kappa_eff`` has to be chosen by the caller, see :func:`kappa_eff_signal`
    and :func:`kappa_eff_bias`.
    """
    if kappa_eff <= 0:
        raise DomainError("kappa_eff must be > 0")
    if g0 < 1:
        raise DomainError("g0 must be >= 1")
    g = g0 / (1.0 - 1j * g0 * np.asarray(delta, dtype=float) / kappa_eff)
    return complex(g) if np.ndim(g) == 0 else g


def bandwidth_analytic(params, g0):
    """3 dB signal bandwidth 2 kappa_eff / g0 (rad/s) in the Lorentzian regime."""
    if not g0 > 1:
        raise DomainError(f"bandwidth undefined for peak amplitude gain {g0!r} <= 1")
    return 2.0 * kappa_eff_signal(params) / g0


def bias_range_analytic(params, g0):
    """3 dB range of Josephson frequency with the signal on resonance (rad/s)."""
    if not g0 > 1:
        raise DomainError(f"bias range undefined for peak amplitude gain {g0!r} <= 1")
    return 2.0 * kappa_eff_bias(params) / g0
