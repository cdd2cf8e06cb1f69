"""Compensated summation of complex term arrays."""

from __future__ import annotations

import math

import numpy as np


def csum(terms: np.ndarray) -> complex | np.ndarray:
    """Sum complex ``terms`` along the last axis with error compensation.

    1-D input goes through ``math.fsum`` on real and imaginary parts (exactly
    rounded).  Higher-rank input uses a vectorised Neumaier loop over the last
    axis, which keeps the error independent of the number of terms.
    """
    terms = np.asarray(terms, dtype=complex)
    if terms.ndim == 1:
        return complex(math.fsum(terms.real), math.fsum(terms.imag))
    re = _neumaier(terms.real)
    im = _neumaier(terms.imag)
    return re + 1j * im


def _neumaier(x: np.ndarray) -> np.ndarray:
    total = np.zeros(x.shape[:-1])
    comp = np.zeros(x.shape[:-1])
    for j in range(x.shape[-1]):
        v = x[..., j]
        t = total + v
        big = np.abs(total) >= np.abs(v)
        comp += np.where(big, (total - t) + v, (v - t) + total)
        total = t
    return total + comp
