import math

import numpy as np
import pytest

from icta.errors import NumericalError
from icta.quadrature import adaptive_gauss_legendre


def test_polynomial_exact():
    val, err, _ = adaptive_gauss_legendre(lambda x: x**5 - 3 * x**2, -1.0, 2.0, order=8)
    assert val[0] == pytest.approx((2**6 - 1) / 6 - (8 + 1), rel=1e-13)


def test_sharp_peak_with_breakpoint():
    # narrow Lorentzian of width 1e-5 at 0.3: integral over [-1, 1] in closed form
    w = 1e-5
    exact = (math.atan((1 - 0.3) / w) - math.atan((-1 - 0.3) / w)) / math.pi
    val, _, _ = adaptive_gauss_legendre(
        lambda x: (w / math.pi) / ((x - 0.3) ** 2 + w * w), -1.0, 1.0,
        breakpoints=(0.3,), order=33, rtol=1e-10,
    )
    assert val[0] == pytest.approx(exact, rel=1e-9)


def test_vector_valued_complex():
    val, _, _ = adaptive_gauss_legendre(
        lambda x: np.vstack([np.exp(1j * x), x**2]), 0.0, math.pi, order=21, rtol=1e-12,
    )
    assert val[0] == pytest.approx(2j, abs=1e-12)
    assert val[1].real == pytest.approx(math.pi**3 / 3, rel=1e-12)


def test_nonconvergence_reports_diagnostics():
    with pytest.raises(NumericalError) as info:
        adaptive_gauss_legendre(lambda x: np.sin(1.0 / x), 1e-3, 1.0, order=5, rtol=1e-12, max_panels=8)
    assert "panels" in info.value.diagnostics
