"""Bias-voltage noise and adiabatic averaging of the parametric gain.

Low-frequency voltage noise spreads the Josephson frequency over a
distribution. Fluctuations are slow compared to the amplifier response, so
the observed amplitude is the ensemble mean of the instantaneous gain,
``<g>``; the coherent power gain is ``|<g>|^2`` while a quantum-limited
amplifier at every instant emits ``<|g|^2> - 1`` noise photons.
"""
from dataclasses import dataclass, field
import math

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .constants import TWO_PI, e, hbar, k_B
from .errors import BandwidthRangeError, DomainError
from .physics import (
    Detunings,
    amplitude_gain,
    bias_range_analytic,
    bandwidth_analytic,
    max_gain,
    _check_xi,
)
from .quadrature import adaptive_gauss_legendre

#: Reported in place of the noise ratio when the effective gain does not exceed 1.
NOT_APPLICABLE = float("nan")

_WEIGHT_TOL = 1e-9
_UNITY_GAIN_GUARD = 1e-9


def fwhm_from_thermal(temperature, impedance):
    """Josephson-frequency FWHM (rad/s) from Johnson noise of a bias impedance.

    ``Delta omega_J = 2 k_B T (4 e^2 / hbar^2) Z(0)``
    """
    if temperature < 0 or impedance < 0:
        raise DomainError("temperature and impedance must be non-negative")
    return 2.0 * k_B * temperature * (4.0 * e**2 / hbar**2) * impedance


def temperature_from_fwhm(fwhm, impedance):
    """Inverse of :func:`fwhm_from_thermal`: effective bias temperature in kelvin."""
    if impedance <= 0:
        raise DomainError(f"impedance must be > 0, got {impedance!r}")
    if fwhm < 0:
        raise DomainError(f"FWHM must be >= 0, got {fwhm!r}")
    return hbar**2 * fwhm / (2.0 * k_B * 4.0 * e**2 * impedance)


@dataclass(frozen=True)
class LorentzianComponent:
    """One Lorentzian line of the Josephson-frequency distribution.

    ``center`` is the offset (rad/s) from the nominal bias. A zero ``fwhm``
    denotes a point mass, the noiseless limit.
    """

    weight: float
    center: float
    fwhm: float

    def __post_init__(self):
        if not self.weight > 0:
            raise DomainError(f"component weight must be > 0, got {self.weight!r}")
        if not (np.isfinite(self.fwhm) and self.fwhm >= 0):
            raise DomainError(f"component FWHM must be >= 0, got {self.fwhm!r}")
        if not np.isfinite(self.center):
            raise DomainError("component center must be finite")


@dataclass(frozen=True)
class BiasDistribution:
    """Normalised mixture of Lorentzians around the nominal Josephson frequency."""

    components: tuple
    nominal: float

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        if not self.components:
            raise DomainError("distribution needs at least one component")
        total = sum(c.weight for c in self.components)
        if abs(total - 1.0) > _WEIGHT_TOL:
            raise DomainError(f"component weights sum to {total!r}, expected 1")

    @classmethod
    def normalized(cls, components, nominal):
        """Build from components whose weights are only relative."""
        components = list(components)
        total = sum(c.weight for c in components)
        comps = tuple(LorentzianComponent(c.weight / total, c.center, c.fwhm) for c in components)
        return cls(comps, nominal)

    @classmethod
    def lorentzian(cls, fwhm, nominal, center=0.0):
        return cls((LorentzianComponent(1.0, center, fwhm),), nominal)

    @classmethod
    def point(cls, nominal):
        """Noiseless bias: all weight at ``nominal``."""
        return cls((LorentzianComponent(1.0, 0.0, 0.0),), nominal)

    @property
    def is_point_mass(self):
        return all(c.fwhm == 0 for c in self.components)

    @property
    def main_fwhm(self):
        """FWHM of the heaviest component."""
        return max(self.components, key=lambda c: c.weight).fwhm

    def shifted(self, d_omega):
        return BiasDistribution(self.components, self.nominal + d_omega)

    def density(self, omega_j):
        return density(self, omega_j)


def density(dist, omega_j):
    """Probability density (s/rad) of the Josephson frequency.

    Point-mass components contribute nothing to the continuous density.
    """
    x = np.asarray(omega_j, dtype=float) - dist.nominal
    out = np.zeros_like(x)
    for c in dist.components:
        if c.fwhm == 0:
            continue
        hw = 0.5 * c.fwhm
        out = out + c.weight * (hw / math.pi) / ((x - c.center) ** 2 + hw * hw)
    return float(out) if out.ndim == 0 else out


def sample_bias(dist, n, rng):
    """Draw ``n`` Josephson frequencies by inverse-CDF sampling of the mixture."""
    cum = np.cumsum([c.weight for c in dist.components])
    cum[-1] = 1.0
    idx = np.searchsorted(cum, rng.random(n), side="right")
    centers = np.array([c.center for c in dist.components])[idx]
    half = 0.5 * np.array([c.fwhm for c in dist.components])[idx]
    u = rng.random(n)
    return dist.nominal + centers + half * np.tan(math.pi * (u - 0.5))


@dataclass(frozen=True)
class AveragedResponse:
    """Bias-noise averaged amplifier response at one signal frequency.

    Attributes
    ----------
    signal_frequency : float
        omega_in (rad/s).
    mean_amplitude : complex
        <g>.
    gain : float
        Effective power gain |<g>|^2.
    gain_variance : float
        <|g - <g>|^2>, the Jensen gap between mean power gain and effective gain.
    """

    signal_frequency: float
    mean_amplitude: complex
    gain: float
    gain_variance: float

    @property
    def mean_power_gain(self):
        """<|g|^2>."""
        return self.gain + self.gain_variance

    @property
    def output_noise(self):
        """Mean output noise in photons, <|g|^2> - 1."""
        return self.mean_power_gain - 1.0

    @property
    def noise_ratio(self):
        """Output noise over that of an ideal amplifier with the same effective gain."""
        if self.gain - 1.0 <= _UNITY_GAIN_GUARD:
            return NOT_APPLICABLE
        return self.output_noise / (self.gain - 1.0)

    @property
    def gain_db(self):
        return 10.0 * math.log10(self.gain)


def _breakpoints(base, half_width, detuning_signal, params, xi):
    """Angles bracketing the gain resonance in the idler detuning."""
    if xi == 0.0:
        return ()
    resonance = detuning_signal * params.kappa_i / params.kappa_s
    scale = max(bias_range_analytic(params, max_gain(xi)) / 2.0, 1e-12 * params.kappa_i)
    points = [resonance + m * scale for m in (-16, -8, -4, -2, -1, 0, 1, 2, 4, 8, 16)]
    return tuple(math.atan((p - base) / half_width) for p in points)


def _component_mean(func, base, comp, detuning_signal, params, xi, order, rtol):
    """Integrate ``func(idler_detuning)`` against one Lorentzian component."""
    if comp.fwhm == 0:
        return np.atleast_2d(func(np.array([base])))[:, 0]
    hw = 0.5 * comp.fwhm
    bounds = 0.5 * math.pi

    def integrand(theta):
        return func(base + hw * np.tan(theta)) / math.pi

    value, _, _ = adaptive_gauss_legendre(
        integrand, -bounds, bounds,
        breakpoints=_breakpoints(base, hw, detuning_signal, params, xi),
        order=order, rtol=rtol, atol=1e-15,
    )
    return value


def averaged_response(params, xi, omega_in, dist, rtol=1e-6, order=257):
    """Average the instantaneous gain over the bias distribution.

    Parameters
    ----------
    params : DeviceParams
    xi : float
        Pump strength, 0 <= xi < 1.
    omega_in : float
        Signal frequency (rad/s).
    dist : BiasDistribution
    rtol : float
        Relative tolerance of the adaptive quadrature.
    order : int
        Gauss-Legendre nodes per panel.

    Returns
    -------
    AveragedResponse

    Raises
    ------
    DivergenceError
        If ``xi >= 1``.
    NumericalError
        If the quadrature cannot reach ``rtol``.
    """
    _check_xi(xi)
    d_s = omega_in - params.omega_s

    def gain_at(d_i):
        return amplitude_gain(Detunings(d_s, d_i), xi, params)

    def first(d_i):
        g = gain_at(d_i)
        return np.vstack([g, np.abs(g) ** 2])

    bases = [dist.nominal + c.center - omega_in - params.omega_i for c in dist.components]
    mean = 0j
    for base, comp in zip(bases, dist.components):
        mean += comp.weight * _component_mean(first, base, comp, d_s, params, xi, order, rtol)[0]

    def spread(d_i):
        return np.abs(gain_at(d_i) - mean) ** 2 + 0j

    variance = 0.0
    for base, comp in zip(bases, dist.components):
        variance += comp.weight * _component_mean(spread, base, comp, d_s, params, xi, order, rtol)[0].real
    mean = complex(mean)
    return AveragedResponse(float(omega_in), mean, abs(mean) ** 2, max(float(variance), 0.0))


def frequency_sweep(params, xi, dist, omega_grid, **kwargs):
    """:func:`averaged_response` on each point of a sorted signal-frequency grid."""
    grid = np.asarray(omega_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise DomainError("frequency grid must be a non-empty 1-D sequence")
    if np.any(np.diff(grid) <= 0):
        raise DomainError("frequency grid must be strictly increasing")
    return [averaged_response(params, xi, w, dist, **kwargs) for w in grid]


def bandwidth_from_samples(frequencies, gains):
    """Full width where ``gains >= max/2``, linearly interpolating the crossings."""
    f = np.asarray(frequencies, dtype=float)
    g = np.asarray(gains, dtype=float)
    if f.size < 3:
        raise BandwidthRangeError("need at least three samples")
    k = int(np.argmax(g))
    if k == 0 or k == f.size - 1:
        raise BandwidthRangeError("gain maximum lies on the grid edge")
    half = 0.5 * g[k]
    below_left = np.nonzero(g[:k] < half)[0]
    below_right = np.nonzero(g[k + 1:] < half)[0]
    if below_left.size == 0 or below_right.size == 0:
        raise BandwidthRangeError("no 3 dB crossing inside the grid")
    i = below_left[-1]
    j = k + 1 + below_right[0]
    lo = f[i] + (half - g[i]) * (f[i + 1] - f[i]) / (g[i + 1] - g[i])
    hi = f[j - 1] + (half - g[j - 1]) * (f[j] - f[j - 1]) / (g[j] - g[j - 1])
    return hi - lo


def extract_bandwidth(curve):
    """3 dB bandwidth (rad/s) of a frequency sweep of :class:`AveragedResponse`."""
    return bandwidth_from_samples(
        [r.signal_frequency for r in curve], [r.gain for r in curve]
    )


def optimal_signal_frequency(params, xi, dist, n_scan=15, xatol=TWO_PI * 1e3, **kwargs):
    """Signal frequency in ``[omega_S - kappa_S, omega_S + kappa_S]`` maximising ``|<g>|^2``.

    A coarse scan brackets the maximum, then a bounded scalar search refines it.
    """
    lo = params.omega_s - params.kappa_s
    hi = params.omega_s + params.kappa_s
    scan = np.linspace(lo, hi, n_scan)
    gains = [averaged_response(params, xi, w, dist, **kwargs).gain for w in scan]
    k = int(np.argmax(gains))
    a = scan[max(k - 1, 0)]
    b = scan[min(k + 1, n_scan - 1)]
    res = minimize_scalar(
        lambda w: -averaged_response(params, xi, w, dist, **kwargs).gain,
        bounds=(a, b), method="bounded", options={"xatol": xatol},
    )
    best = res.x if -res.fun >= gains[k] else scan[k]
    return averaged_response(params, xi, best, dist, **kwargs)


def numerical_bandwidth(params, xi, dist, peak, max_span=None, **kwargs):
    """3 dB bandwidth around ``peak`` (an :class:`AveragedResponse` at the gain maximum).

    Returns ``NOT_APPLICABLE`` when the peak gain is below 2 (no 3 dB crossing).
    """
    if peak.gain < 2.0:
        return NOT_APPLICABLE
    target = 0.5 * peak.gain
    w0 = peak.signal_frequency

    def excess(w):
        return averaged_response(params, xi, w, dist, **kwargs).gain - target

    g0 = max_gain(xi)
    step = 0.25 * bandwidth_analytic(params, g0) if g0 > 1 else params.kappa_s
    span = max_span if max_span is not None else 20.0 * (params.kappa_s + params.kappa_i)
    edges = []
    for sign in (-1.0, 1.0):
        inner, offset = w0, step
        while True:
            outer = w0 + sign * offset
            if excess(outer) < 0:
                break
            inner = outer
            offset *= 2.0
            if offset > span:
                raise BandwidthRangeError("no 3 dB crossing found within the search span")
        edges.append(brentq(excess, min(inner, outer), max(inner, outer), xtol=TWO_PI * 1.0))
    return edges[1] - edges[0]


@dataclass(frozen=True)
class TradeoffPoint:
    """Averaged operating point for one pump strength."""

    xi: float
    signal_frequency: float
    gain: float
    output_noise: float
    noise_ratio: float
    bandwidth: float

    @property
    def gain_db(self):
        return 10.0 * math.log10(self.gain)


def gain_noise_tradeoff(params, dist, xi_grid, **kwargs):
    """Effective gain, bandwidth and noise ratio along a pump-strength sweep.

    For every Xi the signal frequency is re-optimised. Results are sorted by
    effective gain.
    """
    xi_grid = list(xi_grid)
    if not xi_grid:
        raise DomainError("Xi grid is empty")
    for xi in xi_grid:
        _check_xi(xi)
    points = []
    for xi in xi_grid:
        peak = optimal_signal_frequency(params, xi, dist, **kwargs)
        bw = numerical_bandwidth(params, xi, dist, peak, **kwargs)
        points.append(TradeoffPoint(
            xi, peak.signal_frequency, peak.gain, peak.output_noise, peak.noise_ratio, bw,
        ))
    return sorted(points, key=lambda p: p.gain)


def max_gain_within_noise(points, max_ratio=3.0):
    """Largest effective gain (dB) among points whose noise ratio is at most ``max_ratio``."""
    ok = [p.gain_db for p in points if np.isfinite(p.noise_ratio) and p.noise_ratio <= max_ratio]
    if not ok:
        raise DomainError(f"no point with noise ratio <= {max_ratio}")
    return max(ok)


def gain_at_noise_limit(params, dist, xi_grid, max_ratio=3.0, **kwargs):
    """Largest optimised effective gain (dB) with noise ratio at most ``max_ratio``.

    The noise ratio is evaluated on ``xi_grid``; every upward crossing of
    ``max_ratio`` between neighbouring grid points is located with Brent's
    method so the result does not depend on the grid resolution.

    Returns
    -------
    (gain_db, xi) : tuple of float
    """
    xi_grid = np.sort(np.asarray(xi_grid, dtype=float))
    for xi in xi_grid:
        _check_xi(xi)

    def ratio_excess(xi):
        r = optimal_signal_frequency(params, xi, dist, **kwargs).noise_ratio
        return -max_ratio if np.isnan(r) else r - max_ratio

    peaks = [optimal_signal_frequency(params, xi, dist, **kwargs) for xi in xi_grid]
    excess = [-max_ratio if np.isnan(p.noise_ratio) else p.noise_ratio - max_ratio for p in peaks]
    best = (-np.inf, float("nan"))
    for xi, p, e in zip(xi_grid, peaks, excess):
        if e <= 0 and not np.isnan(p.noise_ratio):
            best = max(best, (p.gain_db, float(xi)))
    for k in range(len(xi_grid) - 1):
        if excess[k] <= 0 < excess[k + 1]:
            xi = brentq(ratio_excess, xi_grid[k], xi_grid[k + 1], xtol=1e-10)
            best = max(best, (optimal_signal_frequency(params, xi, dist, **kwargs).gain_db, float(xi)))
    if not np.isfinite(best[0]):
        raise DomainError(f"no pump strength on the grid gives noise ratio <= {max_ratio}")
    return best


def xi_for_averaged_gain(params, dist, gain_db, xi_max=0.9999, **kwargs):
    """Pump strength at which the optimised effective gain reaches ``gain_db``."""
    def excess(xi):
        return optimal_signal_frequency(params, xi, dist, **kwargs).gain_db - gain_db

    if excess(xi_max) < 0:
        raise DomainError(f"averaged gain never reaches {gain_db} dB for Xi < {xi_max}")
    return brentq(excess, 0.0, xi_max, xtol=1e-10)


@dataclass(frozen=True)
class MonteCarloEstimate:
    """Sample-mean estimate of an :class:`AveragedResponse` with standard errors."""

    response: AveragedResponse
    gain_stderr: float
    noise_stderr: float
    n_samples: int
    seed: int = field(default=0)


def monte_carlo_oracle(params, xi, omega_in, dist, n_samples=10**6, seed=0, chunk=2**18):
    """Independent sampling estimate of :func:`averaged_response`.

    Josephson frequencies are drawn by inverse-CDF sampling of the mixture
    from a seeded PCG64 stream, accumulated single-threaded in fixed-size
    chunks, so reruns with one seed are bit-identical.
    """
    if n_samples < 10**4:
        raise DomainError("Monte-Carlo oracle needs at least 10^4 samples")
    _check_xi(xi)
    rng = np.random.default_rng(seed)
    d_s = omega_in - params.omega_s
    g_all = np.empty(n_samples, dtype=complex)
    done = 0
    while done < n_samples:
        n = min(chunk, n_samples - done)
        wj = sample_bias(dist, n, rng)
        g_all[done:done + n] = amplitude_gain(Detunings(d_s, wj - omega_in - params.omega_i), xi, params)
        done += n
    mean = complex(g_all.mean())
    power = np.abs(g_all) ** 2
    mean_power = float(power.mean())
    gain = abs(mean) ** 2
    root_n = math.sqrt(n_samples)
    gain_se = 2.0 * float(np.std((np.conj(mean) * g_all).real)) / root_n
    noise_se = float(np.std(power)) / root_n
    resp = AveragedResponse(float(omega_in), mean, gain, max(mean_power - gain, 0.0))
    return MonteCarloEstimate(resp, gain_se, noise_se, n_samples, seed)
