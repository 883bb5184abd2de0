"""Gain, bandwidth and noise of a DC-powered Josephson parametric amplifier
under bias-voltage noise, plus the spectrum fitting and calibration steps
needed to compare the model with measurements."""

__version__ = "0.1.0"

from .constants import CODATA2018, PhysicalConstants, mhz_to_rad, rad_to_mhz
from .errors import (
    BandwidthRangeError,
    CalibrationError,
    DivergenceError,
    DomainError,
    FitError,
    GridMismatchError,
    NumericalError,
    SeedingError,
)
from .physics import (
    BiasPoint,
    Detunings,
    DeviceParams,
    amplitude_gain,
    bandwidth_analytic,
    coupling_xi,
    detunings,
    ej_critical,
    kappa_eff_bias,
    kappa_eff_signal,
    lorentzian_gain_approx,
    max_gain,
    zero_point_phase,
)
from .bias_noise import (
    AveragedResponse,
    BiasDistribution,
    LorentzianComponent,
    averaged_response,
    density,
    extract_bandwidth,
    frequency_sweep,
    fwhm_from_thermal,
    gain_noise_tradeoff,
    monte_carlo_oracle,
)
from .linewidth import FitResult, SpectrumRecord, effective_temperature, fit_mixture, seed_parameters
from .calibration import (
    CalibrationChain,
    LoadSpectrum,
    device_output_noise,
    line_attenuation,
    planck_occupancy,
    referenced_gain,
    y_factor,
)
from .presets import configuration, device_preset, distribution_preset
