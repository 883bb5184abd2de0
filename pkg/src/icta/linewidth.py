"""Lorentzian-mixture fits of emission spectra versus Josephson frequency.

Model::

    psd(w) = b + sum_k A_k (W_k/2)^2 / ((w - c_k)^2 + (W_k/2)^2)

fitted with a Levenberg-Marquardt iteration on ``(b, log A_k, c_k, log W_k)``
so amplitudes and widths stay positive.
"""
from dataclasses import dataclass, field
import math

import numpy as np
from scipy.ndimage import median_filter
from scipy.signal import find_peaks

from .bias_noise import BiasDistribution, LorentzianComponent, temperature_from_fwhm
from .errors import DomainError, FitError, SeedingError

MIN_POINTS = 8


@dataclass(frozen=True)
class SpectrumRecord:
    """Emission PSD sampled on a strictly increasing Josephson-frequency grid (rad/s)."""

    omega_j: np.ndarray
    psd: np.ndarray
    sigma: np.ndarray = None
    probe_frequency: float = float("nan")
    label: str = ""

    def __post_init__(self):
        x = np.asarray(self.omega_j, dtype=float)
        y = np.asarray(self.psd, dtype=float)
        object.__setattr__(self, "omega_j", x)
        object.__setattr__(self, "psd", y)
        if x.ndim != 1 or x.shape != y.shape:
            raise DomainError("omega_j and psd must be 1-D arrays of equal length")
        if x.size < MIN_POINTS:
            raise DomainError(f"need at least {MIN_POINTS} points, got {x.size}")
        if np.any(np.diff(x) <= 0):
            raise DomainError("omega_j must be strictly increasing")
        if not np.all(np.isfinite(y)):
            raise DomainError("psd values must be finite")
        if self.sigma is not None:
            s = np.asarray(self.sigma, dtype=float)
            if s.shape != x.shape or np.any(s <= 0):
                raise DomainError("sigma must be positive and match psd")
            object.__setattr__(self, "sigma", s)


@dataclass(frozen=True)
class FittedLine:
    amplitude: float
    center: float
    fwhm: float
    amplitude_err: float = float("nan")
    center_err: float = float("nan")
    fwhm_err: float = float("nan")

    @property
    def area(self):
        """Integral of the line over omega_J."""
        return self.amplitude * self.fwhm * math.pi / 2.0


@dataclass(frozen=True)
class FitResult:
    lines: tuple
    background: float
    background_err: float
    residual_norm: float
    converged: bool
    iterations: int
    cost_history: tuple = field(default=(), repr=False)

    def model(self, omega_j):
        return mixture_model(omega_j, self.background, self.lines)

    def to_distribution(self, nominal=None):
        """Normalised Josephson-frequency distribution with area-proportional weights.

        Component centers are stored as offsets from ``nominal``, which defaults
        to the center of the heaviest line.
        """
        if nominal is None:
            nominal = max(self.lines, key=lambda ln: ln.area).center
        comps = [LorentzianComponent(ln.area, ln.center - nominal, ln.fwhm) for ln in self.lines]
        return BiasDistribution.normalized(comps, nominal)

    def effective_temperature(self, impedance, line=None):
        """Bias-impedance temperature (K) from the FWHM of ``line`` (default: heaviest)."""
        ln = self.lines[line] if line is not None else max(self.lines, key=lambda x: x.area)
        return effective_temperature(ln.fwhm, impedance)


def effective_temperature(fwhm, impedance):
    """Effective temperature of the bias impedance from a Josephson-frequency FWHM."""
    return temperature_from_fwhm(fwhm, impedance)


def mixture_model(omega_j, background, lines):
    x = np.asarray(omega_j, dtype=float)
    out = np.full_like(x, background)
    for ln in lines:
        hw2 = (0.5 * ln.fwhm) ** 2
        out += ln.amplitude * hw2 / ((x - ln.center) ** 2 + hw2)
    return out


def _half_max_width(x, y, k, floor):
    half = floor + 0.5 * (y[k] - floor)
    i = k
    while i > 0 and y[i] > half:
        i -= 1
    j = k
    while j < y.size - 1 and y[j] > half:
        j += 1
    return x[j] - x[i]


def seed_parameters(data, n_components, min_prominence=0.02):
    """Initial guess ``(background, [(amplitude, center, fwhm), ...])``.

    Peaks are the ``n_components`` tallest local maxima of the 5-point median
    smoothed PSD, ties going to the lower frequency. Maxima whose prominence is
    below ``min_prominence`` of the data range are treated as noise. All lines
    start with the half-maximum width of the tallest peak, floored at two grid
    steps.
    """
    if n_components < 1:
        raise DomainError(f"n_components must be >= 1, got {n_components}")
    x, y = data.omega_j, data.psd
    smooth = median_filter(y, size=5, mode="nearest")
    background = float(np.min(y))
    span = float(np.max(smooth) - np.min(smooth))
    if span <= 0:
        raise SeedingError("data are flat: no peak to seed")
    peaks, _ = find_peaks(smooth, prominence=min_prominence * span)
    if peaks.size < n_components:
        raise SeedingError(
            f"found {peaks.size} local maxima but {n_components} components requested; "
            "try fewer components"
        )
    order = sorted(peaks, key=lambda i: (-smooth[i], i))[:n_components]
    tallest = order[0]
    step = float(np.min(np.diff(x)))
    width = max(_half_max_width(x, smooth, tallest, background), 2.0 * step)
    lines = [(float(smooth[i] - background), float(x[i]), width) for i in sorted(order)]
    return background, lines


def _lorentz_columns(u, amp, center, width):
    """Value and derivatives w.r.t. (log A, c, log W) of one normalised line."""
    hw2 = 0.25 * width * width
    d = u - center
    den = d * d + hw2
    val = amp * hw2 / den
    d_logw = 2.0 * amp * hw2 * d * d / den**2
    d_c = 2.0 * amp * hw2 * d / den**2
    return val, val, d_c, d_logw


class _Problem:
    """Normalised least-squares problem with optional symmetric side lines."""

    def __init__(self, data, n_components, symmetric):
        x = data.omega_j
        self.x0 = 0.5 * (x[0] + x[-1])
        self.xs = 0.5 * (x[-1] - x[0])
        self.ys = float(np.max(np.abs(data.psd))) or 1.0
        self.u = (x - self.x0) / self.xs
        self.y = data.psd / self.ys
        self.w = 1.0 if data.sigma is None else self.ys / data.sigma
        self.n = n_components
        self.symmetric = symmetric
        if symmetric and n_components != 3:
            raise DomainError("symmetric constraint requires exactly three components")
        n_full = 1 + 3 * n_components
        if symmetric:
            # p = [b, logA0, c0, logW0, logA1, d, logW1]; sides at c0 -/+ d
            t = np.zeros((n_full, 7))
            t[0, 0] = 1
            t[1:4, 1:4] = np.eye(3)
            for k, sign in ((1, -1.0), (2, 1.0)):
                base = 1 + 3 * k
                t[base, 4] = 1
                t[base + 1, 2] = 1
                t[base + 1, 5] = sign
                t[base + 2, 6] = 1
            self.t = t
        else:
            self.t = np.eye(n_full)

    def pack(self, background, lines):
        full = [background / self.ys]
        for amp, c, wdt in lines:
            full += [math.log(max(amp, 1e-12 * self.ys) / self.ys), (c - self.x0) / self.xs, math.log(wdt / self.xs)]
        full = np.array(full)
        if not self.symmetric:
            return full
        mid = np.argsort(full[[2, 5, 8]])  # order by center
        c = full[[2, 5, 8]][mid]
        la = full[[1, 4, 7]][mid]
        lw = full[[3, 6, 9]][mid]
        return np.array([full[0], la[1], c[1], lw[1], 0.5 * (la[0] + la[2]),
                         0.5 * (c[2] - c[0]), 0.5 * (lw[0] + lw[2])])

    def residual_jacobian(self, p):
        q = self.t @ p
        model = np.full_like(self.u, q[0])
        jac = np.empty((self.u.size, q.size))
        jac[:, 0] = 1.0
        for k in range(self.n):
            la, c, lw = q[1 + 3 * k:4 + 3 * k]
            val, d_la, d_c, d_lw = _lorentz_columns(self.u, math.exp(la), c, math.exp(lw))
            model += val
            jac[:, 1 + 3 * k] = d_la
            jac[:, 2 + 3 * k] = d_c
            jac[:, 3 + 3 * k] = d_lw
        r = self.w * (model - self.y)
        j = (self.w * jac.T).T if np.ndim(self.w) else self.w * jac
        return r, j @ self.t

    def unpack(self, p, cov):
        q = self.t @ p
        qcov = self.t @ cov @ self.t.T
        err = np.sqrt(np.clip(np.diag(qcov), 0, None))
        lines = []
        for k in range(self.n):
            la, c, lw = q[1 + 3 * k:4 + 3 * k]
            ela, ec, elw = err[1 + 3 * k:4 + 3 * k]
            amp = self.ys * math.exp(la)
            wdt = self.xs * math.exp(lw)
            lines.append(FittedLine(amp, self.x0 + self.xs * c, wdt, amp * ela, self.xs * ec, wdt * elw))
        lines.sort(key=lambda ln: ln.center)
        return tuple(lines), self.ys * q[0], self.ys * err[0]


def fit_mixture(data, n_components, symmetric=False, initial=None,
                max_iter=200, xtol=1e-8, ftol=1e-10, gtol=1e-12):
    """Least-squares fit of a constant background plus ``n_components`` Lorentzians.

    Parameters
    ----------
    data : SpectrumRecord
    n_components : int
    symmetric : bool
        For three components, constrain the outer lines to equal amplitude and
        width, placed symmetrically about the central line.
    initial : tuple, optional
        ``(background, [(amplitude, center, fwhm), ...])``; defaults to
        :func:`seed_parameters`.

    Returns
    -------
    FitResult

    Raises
    ------
    FitError
        When the iteration does not converge within ``max_iter`` (``err.best``
        holds the best-so-far fit) or the Jacobian is rank deficient.
    """
    if not isinstance(n_components, (int, np.integer)) or n_components < 1:
        raise DomainError(f"n_components must be a positive integer, got {n_components!r}")
    if 3 * n_components + 1 > data.omega_j.size:
        raise DomainError("more parameters than data points")
    if initial is None:
        initial = seed_parameters(data, n_components)
    prob = _Problem(data, n_components, symmetric)
    p = prob.pack(*initial)

    r, j = prob.residual_jacobian(p)
    if np.linalg.matrix_rank(j) < p.size:
        raise FitError("Jacobian is rank deficient at the initial point")
    cost = float(r @ r)
    history = [cost]
    lam = 1e-3
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        jtj = j.T @ j
        grad = j.T @ r
        if np.max(np.abs(grad)) <= gtol * max(1.0, cost):
            converged = True
            break
        diag = np.diag(jtj).copy()
        diag[diag == 0] = 1.0
        accepted = False
        while lam < 1e16:
            try:
                step = np.linalg.solve(jtj + lam * np.diag(diag), -grad)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            trial = p + step
            r_new, j_new = prob.residual_jacobian(trial)
            new_cost = float(r_new @ r_new)
            if np.isfinite(new_cost) and new_cost <= cost:
                accepted = True
                break
            lam *= 10.0
        if not accepted:
            # no descent direction left: at a (numerical) minimum
            converged = cost <= 1e-28 * prob.y.size or np.max(np.abs(grad)) <= 1e-8 * max(1.0, math.sqrt(cost))
            break
        rel_step = np.linalg.norm(step) / (np.linalg.norm(p) + xtol)
        rel_cost = (cost - new_cost) / max(cost, 1e-300)
        p, r, j, cost = trial, r_new, j_new, new_cost
        history.append(cost)
        lam = max(lam / 10.0, 1e-12)
        if rel_step < xtol or rel_cost < ftol or cost <= 1e-28 * prob.y.size:
            converged = True
            break

    jtj = j.T @ j
    dof = max(prob.u.size - p.size, 1)
    try:
        cov = np.linalg.inv(jtj)
    except np.linalg.LinAlgError:
        cov = np.full_like(jtj, np.nan)
    if data.sigma is None:
        cov = cov * (cost / dof)
    lines, bg, bg_err = prob.unpack(p, cov)
    norm = math.sqrt(cost) * (prob.ys if data.sigma is None else 1.0)
    result = FitResult(lines, bg, bg_err, norm, converged, it, tuple(history))
    if not converged:
        raise FitError(f"fit did not converge in {max_iter} iterations", best=result,
                       diagnostics={"cost": cost, "iterations": it})
    return result
