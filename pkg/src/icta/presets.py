"""Named device and bias-noise configurations of the two measured samples."""
from .constants import mhz_to_rad
from .physics import DeviceParams

# As printed in the device parameter table (MHz, ohm).
SAMPLE_TABLE = {
    "sample_A": dict(f_s=4800.0, f_i=6200.0, w_s=96.0, w_i=226.0, z=400.0, degenerate=False),
    "sample_B": dict(f_s=4450.0, f_i=4450.0, w_s=185.0, w_i=185.0, z=80.0, degenerate=True),
}

# Fixed Josephson frequencies used for the gain/noise/bandwidth scatter (MHz).
OPERATING_BIAS_MHZ = {"sample_A": 10952.0, "sample_B": 8982.0}

# Fitted Josephson-frequency distributions: (weight, center offset MHz, FWHM MHz).
# The side-peak weights of the medium configuration are not published; equal
# halves of the central weight are assumed.
DISTRIBUTION_TABLE = {
    "low": [(1.0, 0.0, 5.6)],
    "medium": [(0.5, 0.0, 28.5), (0.25, -48.0, 45.8), (0.25, 48.0, 45.8)],
    "high": [(1.0, 0.0, 73.8)],
}

# Which sample each noise configuration was measured on.
CONFIGURATION_SAMPLE = {"low": "sample_A", "medium": "sample_B", "high": "sample_B"}


def device_preset(name, e_j=0.0):
    """DeviceParams for ``"sample_A"`` or ``"sample_B"``."""
    try:
        row = SAMPLE_TABLE[name]
    except KeyError:
        raise KeyError(f"unknown device preset {name!r}; choose from {sorted(SAMPLE_TABLE)}") from None
    if row["degenerate"]:
        return DeviceParams.single_mode(mhz_to_rad(row["f_s"]), mhz_to_rad(row["w_s"]), row["z"], e_j)
    return DeviceParams(
        mhz_to_rad(row["f_s"]), mhz_to_rad(row["f_i"]),
        mhz_to_rad(row["w_s"]), mhz_to_rad(row["w_i"]),
        row["z"], row["z"], e_j,
    )


def distribution_preset(name, nominal_bias):
    """BiasDistribution for ``"low"``, ``"medium"`` or ``"high"`` centred on ``nominal_bias`` (rad/s)."""
    from .bias_noise import BiasDistribution, LorentzianComponent

    try:
        rows = DISTRIBUTION_TABLE[name]
    except KeyError:
        raise KeyError(f"unknown distribution preset {name!r}; choose from {sorted(DISTRIBUTION_TABLE)}") from None
    comps = [LorentzianComponent(w, mhz_to_rad(c), mhz_to_rad(f)) for w, c, f in rows]
    return BiasDistribution(tuple(comps), nominal_bias)


def configuration(name, bias="operating"):
    """Device and distribution of a noise configuration.

    ``bias`` is ``"operating"`` (the fixed Josephson frequency used in the
    measurement), ``"optimal"`` (omega_S + omega_I) or a number in rad/s.
    """
    sample = CONFIGURATION_SAMPLE[name]
    params = device_preset(sample)
    if bias == "operating":
        omega_j0 = mhz_to_rad(OPERATING_BIAS_MHZ[sample])
    elif bias == "optimal":
        omega_j0 = params.optimal_bias
    else:
        omega_j0 = float(bias)
    return params, distribution_preset(name, omega_j0)
