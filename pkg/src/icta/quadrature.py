"""Globally adaptive composite Gauss-Legendre quadrature for vector integrands."""
import heapq
from functools import lru_cache

import numpy as np

from .errors import NumericalError


@lru_cache(maxsize=16)
def _gauss_legendre(order):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def _panel(func, a, b, x, w):
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    values = np.atleast_2d(func(mid + half * x))
    return half * (values @ w)


def adaptive_gauss_legendre(func, a, b, breakpoints=(), order=257, rtol=1e-6, atol=0.0, max_panels=4000):
    """Integrate a vector-valued ``func`` over ``[a, b]``.

    ``func`` maps a 1-D array of abscissae to an array of shape ``(m, n)``
    (or ``(n,)``). Each panel is compared against the sum of its two halves;
    the panel with the largest discrepancy is bisected until the summed
    discrepancy is below ``max(atol, rtol * |I|)`` in the infinity norm.

    Returns
    -------
    integral : ndarray, shape (m,)
    error : float
        Estimated absolute error (infinity norm).
    n_panels : int
    """
    x, w = _gauss_legendre(order)
    edges = sorted({a, b, *[p for p in breakpoints if a < p < b]})

    def assess(lo, hi):
        whole = _panel(func, lo, hi, x, w)
        mid = 0.5 * (lo + hi)
        left = _panel(func, lo, mid, x, w)
        right = _panel(func, mid, hi, x, w)
        fine = left + right
        return np.max(np.abs(fine - whole)), fine

    heap = []
    total = None
    err_total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        err, val = assess(lo, hi)
        heapq.heappush(heap, (-err, lo, hi, val))
        total = val if total is None else total + val
        err_total += err

    while True:
        scale = np.max(np.abs(total))
        if err_total <= max(atol, rtol * scale):
            return total, err_total, len(heap)
        if len(heap) >= max_panels:
            raise NumericalError(
                "adaptive quadrature did not converge",
                {"estimate": total.tolist(), "error": err_total, "panels": len(heap), "rtol": rtol},
            )
        neg_err, lo, hi, val = heapq.heappop(heap)
        total = total - val
        err_total += neg_err
        mid = 0.5 * (lo + hi)
        for sub_lo, sub_hi in ((lo, mid), (mid, hi)):
            err, sub = assess(sub_lo, sub_hi)
            heapq.heappush(heap, (-err, sub_lo, sub_hi, sub))
            total = total + sub
            err_total += err
