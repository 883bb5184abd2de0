"""Physical constants and unit helpers.

Internally every frequency and linewidth is an angular frequency in rad/s.
Anything that crosses the I/O boundary is in MHz (ordinary frequency).
"""
from dataclasses import dataclass
import math

import numpy as np


@dataclass(frozen=True)
class PhysicalConstants:
    """Exact SI defining constants (CODATA 2018)."""

    h: float = 6.62607015e-34  # J s
    e: float = 1.602176634e-19  # C
    k_B: float = 1.380649e-23  # J/K

    @property
    def hbar(self):
        return self.h / (2.0 * math.pi)

    @property
    def conductance_quantum_4e2_h(self):
        """Pair conductance 4e^2/h in siemens."""
        return 4.0 * self.e**2 / self.h


CODATA2018 = PhysicalConstants()

hbar = CODATA2018.hbar
h = CODATA2018.h
e = CODATA2018.e
k_B = CODATA2018.k_B

TWO_PI = 2.0 * math.pi
_MHZ = 1e6


def mhz_to_rad(f_mhz):
    """Ordinary frequency in MHz to angular frequency in rad/s."""
    return f_mhz * (TWO_PI * _MHZ)


def rad_to_mhz(omega):
    """Angular frequency in rad/s to ordinary frequency in MHz."""
    return omega / (TWO_PI * _MHZ)


def energy_to_mhz(energy):
    """Energy in joule expressed as E/h in MHz."""
    return energy / h / _MHZ


def mhz_to_energy(f_mhz):
    return f_mhz * _MHZ * h


def amplitude_to_db(g):
    """Power gain in dB of an amplitude gain (20 log10 |g|)."""
    return 20.0 * np.log10(np.abs(g))


def power_to_db(p):
    return 10.0 * np.log10(p)


def db_to_power(db):
    return 10.0 ** (db / 10.0)
