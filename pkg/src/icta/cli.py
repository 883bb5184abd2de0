"""Command-line interface.

    icta predict --device sample_A --dist lorentzian:5.6 --xi-grid 0.3:0.999:40
    icta sweep --device sample_B --dist preset:high --xi-grid 0.8:0.95:4 --freq-grid 4350:4550:201
    icta fit-linewidth spectrum.csv --components 3 --impedance 5
    icta calibrate --hot hot.csv --cold cold.csv --t-hot-mk 1000 --t-cold-mk 10 \\
        --short short.csv --on on.csv --off off.csv --on-noise noise.csv --sc sc.csv

All frequencies on the command line and in files are in MHz, temperatures
in mK, gains in dB. Exit codes: 0 ok, 2 invalid input, 3 numerical failure,
4 I/O or parse error.
"""
import argparse
import json
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import calibration as cal
from . import io
from .bias_noise import (
    BiasDistribution,
    LorentzianComponent,
    extract_bandwidth,
    frequency_sweep,
    gain_noise_tradeoff,
    max_gain_within_noise,
    monte_carlo_oracle,
)
from .constants import mhz_to_energy, mhz_to_rad, rad_to_mhz, energy_to_mhz
from .errors import CalibrationError, DomainError, ICTAError, NumericalError
from .linewidth import SpectrumRecord, fit_mixture
from .physics import DeviceParams, ej_critical, max_gain
from .presets import DISTRIBUTION_TABLE, OPERATING_BIAS_MHZ, SAMPLE_TABLE, device_preset

log = logging.getLogger("icta")

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

OUTPUT_DIR_ENV = "ICTA_OUTPUT_DIR"


class ConfigError(DomainError):
    """Invalid run configuration; ``field`` names the offending entry."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


# ---------------------------------------------------------------- parsing

def parse_grid(text, field, upper_open=None):
    """``start:stop:n`` to a sorted array (inclusive ends)."""
    try:
        start, stop, n = text.split(":")
        start, stop, n = float(start), float(stop), int(n)
    except ValueError:
        raise ConfigError(field, f"expected start:stop:n, got {text!r}") from None
    if n < 1:
        raise ConfigError(field, "grid is empty")
    if n > 1 and not stop > start:
        raise ConfigError(field, "grid must be increasing (stop > start)")
    grid = np.linspace(start, stop, n) if n > 1 else np.array([start])
    if upper_open is not None and np.any(grid >= upper_open):
        raise ConfigError(field, f"values must be < {upper_open}")
    return grid


def load_device(spec):
    """Preset name or JSON file with keys in MHz/ohm."""
    if spec in SAMPLE_TABLE:
        return device_preset(spec), {"preset": spec}
    path = Path(spec)
    if not path.exists():
        raise ConfigError("device", f"{spec!r} is neither a preset ({sorted(SAMPLE_TABLE)}) nor a file")
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise io.ParseError(f"{path}: {exc}") from exc
    try:
        degenerate = bool(raw.get("degenerate", False))
        f_s, w_s, z_s = raw["f_s_mhz"], raw["kappa_s_mhz"], raw["z_s_ohm"]
        f_i = raw.get("f_i_mhz", f_s if degenerate else None)
        w_i = raw.get("kappa_i_mhz", w_s if degenerate else None)
        z_i = raw.get("z_i_ohm", z_s if degenerate else None)
        if None in (f_i, w_i, z_i):
            raise KeyError("f_i_mhz/kappa_i_mhz/z_i_ohm")
        e_j = mhz_to_energy(raw.get("ej_mhz", 0.0))
    except KeyError as exc:
        raise ConfigError(f"device.{exc.args[0]}", "missing") from None
    params = DeviceParams(mhz_to_rad(f_s), mhz_to_rad(f_i), mhz_to_rad(w_s), mhz_to_rad(w_i),
                          z_s, z_i, e_j, degenerate)
    return params, {"file": str(path), **raw}


def resolve_bias(spec, params, device_cfg):
    if spec == "optimal":
        return params.optimal_bias
    if spec == "operating":
        name = device_cfg.get("preset")
        if name not in OPERATING_BIAS_MHZ:
            raise ConfigError("bias", "'operating' needs a device preset")
        return mhz_to_rad(OPERATING_BIAS_MHZ[name])
    try:
        return mhz_to_rad(float(spec))
    except ValueError:
        raise ConfigError("bias", f"expected 'optimal', 'operating' or MHz, got {spec!r}") from None


def parse_distribution(spec, nominal):
    """Distribution from ``point``, ``preset:NAME``, ``lorentzian:...`` or a fit results file.

    ``lorentzian:FWHM[,CENTER[,WEIGHT]][;FWHM,...]`` in MHz; weights are relative.
    """
    if spec == "point":
        return BiasDistribution.point(nominal), {"kind": "point"}
    if spec.startswith("preset:"):
        name = spec.split(":", 1)[1]
        if name not in DISTRIBUTION_TABLE:
            raise ConfigError("dist", f"unknown preset {name!r}; choose from {sorted(DISTRIBUTION_TABLE)}")
        rows = DISTRIBUTION_TABLE[name]
        comps = [LorentzianComponent(w, mhz_to_rad(c), mhz_to_rad(f)) for w, c, f in rows]
        return BiasDistribution(comps, nominal), {"kind": "preset", "name": name,
                                                  "components_mhz": [list(r) for r in rows]}
    if spec.startswith("lorentzian:"):
        rows = []
        for part in spec.split(":", 1)[1].split(";"):
            try:
                vals = [float(v) for v in part.split(",")]
            except ValueError:
                raise ConfigError("dist", f"cannot parse component {part!r}") from None
            if not 1 <= len(vals) <= 3:
                raise ConfigError("dist", f"component {part!r} needs FWHM[,center[,weight]]")
            fwhm, center, weight = (vals + [0.0, 1.0][len(vals) - 1:])[:3]
            rows.append((weight, center, fwhm))
        try:
            comps = [LorentzianComponent(w, mhz_to_rad(c), mhz_to_rad(f)) for w, c, f in rows]
        except DomainError as exc:
            raise ConfigError("dist", str(exc)) from None
        return BiasDistribution.normalized(comps, nominal), {"kind": "lorentzian",
                                                             "components_mhz": [list(r) for r in rows]}
    path = Path(spec)
    if path.exists():
        doc = io.read_document(path)
        if doc["command"] != "fit-linewidth":
            raise ConfigError("dist", f"{path} is not a fit-linewidth results document")
        data = doc["tables"]["components"]["data"]
        center = np.array(data["center_mhz"], dtype=float)
        weight = np.array(data["weight"], dtype=float)
        ref = center[int(np.argmax(weight))]
        rows = [(w, c - ref, f) for w, c, f in zip(weight, center, data["fwhm_mhz"])]
        comps = [LorentzianComponent(w, mhz_to_rad(c), mhz_to_rad(f)) for w, c, f in rows]
        return BiasDistribution.normalized(comps, nominal), {"kind": "fit", "file": str(path),
                                                             "components_mhz": [list(r) for r in rows]}
    raise ConfigError("dist", f"unrecognised distribution {spec!r}")


def resolve_xi_grid(args, params):
    if args.xi_grid and args.ej_grid:
        raise ConfigError("xi-grid", "give either --xi-grid or --ej-grid, not both")
    if args.ej_grid:
        ej = parse_grid(args.ej_grid, "ej-grid")
        xi = mhz_to_energy(ej) / ej_critical(params)
        if np.any(xi >= 1):
            raise ConfigError("ej-grid", f"E_J/h must stay below {energy_to_mhz(ej_critical(params)):.6g} MHz")
        return xi
    return parse_grid(args.xi_grid or "0.3:0.999:40", "xi-grid", upper_open=1.0)


def output_path(args, command):
    if args.out:
        return Path(args.out)
    return Path(os.environ.get(OUTPUT_DIR_ENV, ".")) / f"{command}.json"


def _device_echo(params, cfg):
    return {
        **cfg,
        "f_s_mhz": rad_to_mhz(params.omega_s), "f_i_mhz": rad_to_mhz(params.omega_i),
        "kappa_s_mhz": rad_to_mhz(params.kappa_s), "kappa_i_mhz": rad_to_mhz(params.kappa_i),
        "z_s_ohm": params.z_s, "z_i_ohm": params.z_i, "degenerate": params.degenerate,
        "ej_critical_mhz": energy_to_mhz(ej_critical(params)),
    }


def _model_setup(args):
    params, dev_cfg = load_device(args.device)
    nominal = resolve_bias(args.bias, params, dev_cfg)
    dist, dist_cfg = parse_distribution(args.dist, nominal)
    if not args.rtol > 0:
        raise ConfigError("rtol", "must be positive")
    config = {
        "device": _device_echo(params, dev_cfg),
        "distribution": dist_cfg,
        "bias_mhz": rad_to_mhz(nominal),
        "rtol": args.rtol,
    }
    inputs = [p for p in (args.device, args.dist) if Path(p).exists()]
    return params, dist, config, inputs


# --------------------------------------------------------------- commands

def _tradeoff_table(points):
    return io.table(
        ["xi", "gain_db", "bandwidth_mhz", "noise_ratio", "output_noise", "signal_mhz"],
        units={"gain_db": "dB", "bandwidth_mhz": "MHz", "signal_mhz": "MHz", "output_noise": "photons"},
        xi=[p.xi for p in points],
        gain_db=[p.gain_db for p in points],
        bandwidth_mhz=[rad_to_mhz(p.bandwidth) for p in points],
        noise_ratio=[p.noise_ratio for p in points],
        output_noise=[p.output_noise for p in points],
        signal_mhz=[rad_to_mhz(p.signal_frequency) for p in points],
    )


def cmd_predict(args):
    params, dist, config, inputs = _model_setup(args)
    xi = resolve_xi_grid(args, params)
    config["xi_grid"] = xi.tolist()
    kw = {"rtol": args.rtol}
    points = gain_noise_tradeoff(params, dist, xi, **kw)
    reference = gain_noise_tradeoff(params, BiasDistribution.point(dist.nominal), xi, **kw)
    tables = {"tradeoff": _tradeoff_table(points), "reference": _tradeoff_table(reference)}
    scalars = {"distribution_fwhm_mhz": rad_to_mhz(dist.main_fwhm)}
    try:
        scalars["max_gain_db_noise_ratio_le_3"] = max_gain_within_noise(points, 3.0)
    except DomainError:
        scalars["max_gain_db_noise_ratio_le_3"] = None
    if args.mc_samples:
        config["seed"] = args.seed
        config["mc_samples"] = args.mc_samples
        mc = [monte_carlo_oracle(params, p.xi, p.signal_frequency, dist, args.mc_samples, args.seed)
              for p in points]
        tables["monte_carlo"] = io.table(
            ["xi", "gain_db", "gain_stderr", "output_noise", "noise_stderr"],
            xi=[p.xi for p in points],
            gain_db=[m.response.gain_db for m in mc],
            gain_stderr=[m.gain_stderr for m in mc],
            output_noise=[m.response.output_noise for m in mc],
            noise_stderr=[m.noise_stderr for m in mc],
        )
    return io.results_document("predict", config, tables, scalars, inputs)


def cmd_sweep(args):
    params, dist, config, inputs = _model_setup(args)
    xi = resolve_xi_grid(args, params)
    default = f"{rad_to_mhz(params.omega_s - params.kappa_s)}:{rad_to_mhz(params.omega_s + params.kappa_s)}:201"
    freq = parse_grid(args.freq_grid or default, "freq-grid")
    config["xi_grid"] = xi.tolist()
    config["freq_grid_mhz"] = freq.tolist()
    config["seed"] = args.seed
    omega = mhz_to_rad(freq)
    gain_map, noise_map, ratio_map = [], [], []
    bw, g0_db, peak_db = [], [], []
    for x in xi:
        curve = frequency_sweep(params, x, dist, omega, rtol=args.rtol)
        gain_map.append([r.gain_db for r in curve])
        noise_map.append([r.output_noise for r in curve])
        ratio_map.append([r.noise_ratio for r in curve])
        g0_db.append(20.0 * math.log10(max_gain(x)))
        peak_db.append(max(r.gain_db for r in curve))
        try:
            bw.append(rad_to_mhz(extract_bandwidth(curve)))
        except DomainError:
            bw.append(float("nan"))
    peak_amp = 10.0 ** (np.array(peak_db) / 20.0)
    tables = {
        "maps": io.table(
            ["xi", "gain_db", "output_noise", "noise_ratio"],
            units={"gain_db": "dB", "output_noise": "photons"},
            xi=xi.tolist(), gain_db=gain_map, output_noise=noise_map, noise_ratio=ratio_map,
        ),
        "frequency": io.table(["freq_mhz"], units={"freq_mhz": "MHz"}, freq_mhz=freq.tolist()),
        "per_xi": io.table(
            ["xi", "g0_db", "peak_gain_db", "bandwidth_mhz", "gain_bandwidth_mhz"],
            xi=xi.tolist(), g0_db=g0_db, peak_gain_db=peak_db, bandwidth_mhz=bw,
            gain_bandwidth_mhz=(np.array(bw) * peak_amp).tolist(),
        ),
    }
    return io.results_document("sweep", config, tables, {}, inputs)


def cmd_fit_linewidth(args):
    cols = io.read_columns(args.input, ["wj_mhz", "psd"], optional=["sigma"])
    record = SpectrumRecord(mhz_to_rad(cols["wj_mhz"]), cols["psd"], cols.get("sigma"), label=str(args.input))
    fit = fit_mixture(record, args.components, symmetric=args.symmetric)
    dist = fit.to_distribution()
    lines = fit.lines
    tables = {
        "components": io.table(
            ["center_mhz", "center_err_mhz", "fwhm_mhz", "fwhm_err_mhz", "amplitude", "amplitude_err", "weight"],
            units={"center_mhz": "MHz", "fwhm_mhz": "MHz"},
            center_mhz=[rad_to_mhz(ln.center) for ln in lines],
            center_err_mhz=[rad_to_mhz(ln.center_err) for ln in lines],
            fwhm_mhz=[rad_to_mhz(ln.fwhm) for ln in lines],
            fwhm_err_mhz=[rad_to_mhz(ln.fwhm_err) for ln in lines],
            amplitude=[ln.amplitude for ln in lines],
            amplitude_err=[ln.amplitude_err for ln in lines],
            weight=[c.weight for c in dist.components],
        ),
        "curve": io.table(
            ["wj_mhz", "psd", "psd_fit"],
            wj_mhz=cols["wj_mhz"].tolist(), psd=cols["psd"].tolist(),
            psd_fit=fit.model(record.omega_j).tolist(),
        ),
    }
    scalars = {
        "background": fit.background,
        "residual_norm": fit.residual_norm,
        "converged": fit.converged,
        "iterations": fit.iterations,
    }
    config = {"input": str(args.input), "components": args.components, "symmetric": args.symmetric}
    if args.impedance is not None:
        config["impedance_ohm"] = args.impedance
        scalars["temperature_mk"] = fit.effective_temperature(args.impedance) * 1e3
    return io.results_document("fit-linewidth", config, tables, scalars, [args.input])


def cmd_calibrate(args):
    if not (args.t_hot_mk > 0 and args.t_cold_mk > 0):
        raise ConfigError("t-hot-mk/t-cold-mk", "temperatures must be positive")
    files = {
        "hot": args.hot, "cold": args.cold, "short": args.short, "device_on": args.on,
        "device_off": args.off, "device_noise": args.on_noise, "device_superconducting": args.sc,
    }
    temps = {"hot": args.t_hot_mk * 1e-3, "cold": args.t_cold_mk * 1e-3}
    spectra = {}
    for label, path in files.items():
        cols = io.read_columns(path, ["freq_mhz", "value"])
        spectra[label] = cal.LoadSpectrum(mhz_to_rad(cols["freq_mhz"]), cols["value"], label,
                                          temps.get(label, float("nan")))
    res = cal.calibrate(
        spectra["hot"], spectra["cold"], spectra["short"], spectra["device_on"],
        spectra["device_off"], spectra["device_noise"], spectra["device_superconducting"],
        flatness_db=args.flatness_db,
    )
    freq = rad_to_mhz(res.chain.omega)
    tables = {
        "chain": io.table(
            ["freq_mhz", "chain_gain", "chain_noise"],
            units={"freq_mhz": "MHz", "chain_noise": "photons"},
            freq_mhz=freq.tolist(), chain_gain=res.chain.gain.tolist(), chain_noise=res.chain.noise.tolist(),
        ),
        "device": io.table(
            ["freq_mhz", "gain_db", "output_noise", "noise_ratio"],
            units={"freq_mhz": "MHz", "gain_db": "dB", "output_noise": "photons"},
            freq_mhz=freq.tolist(), gain_db=(10.0 * np.log10(res.gain)).tolist(),
            output_noise=res.output_noise.tolist(), noise_ratio=res.noise_ratio.tolist(),
        ),
    }
    scalars = {
        "attenuation_db": res.attenuation.db,
        "attenuation_linear": res.attenuation.linear,
        "attenuation_flat": res.attenuation.flat,
        "attenuation_max_deviation_db": res.attenuation.max_deviation_db,
        "attenuation_warning": res.attenuation.warning,
    }
    config = {"files": {k: str(v) for k, v in files.items()}, "t_hot_mk": args.t_hot_mk,
              "t_cold_mk": args.t_cold_mk, "flatness_db": args.flatness_db}
    return io.results_document("calibrate", config, tables, scalars, list(files.values()))


# ----------------------------------------------------------------- parser

def build_parser():
    ap = argparse.ArgumentParser(prog="icta", description=__doc__.split("\n\n")[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common_out(p):
        p.add_argument("--out", help=f"results JSON path (default ${OUTPUT_DIR_ENV}/<command>.json)")
        p.add_argument("--tables-dir", help="also write one CSV per table here")

    def model(p):
        p.add_argument("--device", default="sample_A", help="preset (sample_A, sample_B) or JSON file")
        p.add_argument("--dist", default="preset:low",
                       help="point | preset:low|medium|high | lorentzian:FWHM[,CENTER[,WEIGHT]][;...] | fit results JSON")
        p.add_argument("--bias", default="optimal", help="optimal | operating | Josephson frequency in MHz")
        p.add_argument("--xi-grid", help="start:stop:n (default 0.3:0.999:40)")
        p.add_argument("--ej-grid", help="E_J/h grid in MHz, start:stop:n")
        p.add_argument("--rtol", type=float, default=1e-6, help="quadrature relative tolerance")
        common_out(p)

    p = sub.add_parser("predict", help="gain / bandwidth / noise trade-off along a pump sweep")
    model(p)
    p.add_argument("--mc-samples", type=int, default=0, help="add a Monte-Carlo cross-check with this many samples")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("sweep", help="gain and noise maps versus pump strength and signal frequency")
    model(p)
    p.add_argument("--freq-grid", help="signal frequency grid start:stop:n in MHz")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("fit-linewidth", help="Lorentzian-mixture fit of a Josephson-frequency spectrum")
    p.add_argument("input", help="CSV with columns wj_mhz, psd[, sigma]")
    p.add_argument("--components", type=int, default=1)
    p.add_argument("--symmetric", action="store_true", help="three components with symmetric side lines")
    p.add_argument("--impedance", type=float, help="bias impedance in ohm, for the effective temperature")
    common_out(p)
    p.set_defaults(func=cmd_fit_linewidth)

    p = sub.add_parser("calibrate", help="Y-factor and on/off calibration of measured spectra")
    for name, what in (("hot", "hot load noise"), ("cold", "cold load noise"), ("short", "tone with switch shorted"),
                       ("on", "tone, device on"), ("off", "tone, device off"),
                       ("on-noise", "noise, device on"), ("sc", "noise, junction superconducting")):
        p.add_argument(f"--{name}", required=True, help=f"CSV (freq_mhz, value): {what}")
    p.add_argument("--t-hot-mk", type=float, required=True)
    p.add_argument("--t-cold-mk", type=float, required=True)
    p.add_argument("--flatness-db", type=float, default=0.2)
    common_out(p)
    p.set_defaults(func=cmd_calibrate)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        doc = args.func(args)
        out = output_path(args, args.command)
        io.write_document(doc, out)
        if args.tables_dir:
            io.write_tables(doc, args.tables_dir)
    except io.ParseError as exc:
        print(f"icta: error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"icta: error: {exc}", file=sys.stderr)
        return EXIT_IO
    except NumericalError as exc:
        print(f"icta: numerical failure: {exc}", file=sys.stderr)
        if exc.diagnostics:
            print(json.dumps(io._clean(exc.diagnostics), sort_keys=True), file=sys.stderr)
        return EXIT_NUMERICAL
    except (DomainError, CalibrationError, ICTAError) as exc:
        print(f"icta: invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    log.info("wrote %s", out)
    print(out)
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
