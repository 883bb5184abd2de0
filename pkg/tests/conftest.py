import numpy as np
import pytest

from icta.constants import mhz_to_rad
from icta.physics import DeviceParams
from icta.presets import device_preset


@pytest.fixture
def sample_a():
    return device_preset("sample_A")


@pytest.fixture
def sample_b():
    return device_preset("sample_B")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def make_device(f_s=4800.0, f_i=6200.0, w_s=96.0, w_i=226.0, z=400.0):
    return DeviceParams(mhz_to_rad(f_s), mhz_to_rad(f_i), mhz_to_rad(w_s), mhz_to_rad(w_i), z, z)


ACCEPTANCE = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[ACCEPTANCE] = {}


@pytest.fixture
def acceptance(request):
    """Record ``(criterion, passed, detail)``; the lines are printed in the terminal summary."""
    results = request.config.stash[ACCEPTANCE]

    def report(number, passed, detail):
        line = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
        results[number] = line
        print(line)
        return passed

    return report


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash.get(ACCEPTANCE, {})
    if results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(results):
            terminalreporter.write_line(results[number])
