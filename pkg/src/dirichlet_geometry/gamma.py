"""Lanczos log-gamma for complex arguments, with analytic digamma/trigamma.

All functions accept scalars or numpy arrays.  The log-gamma value is a
continuous log of Gamma, not necessarily the principal branch; callers only
exponentiate it or differentiate it.
"""

from __future__ import annotations

import math

import numpy as np

# g = 7, n = 9 (Godfrey); relative error ~1e-15 on Re z >= 1/2
_G = 7.0
_C = np.array(
    [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ]
)
_HALF_LOG_2PI = 0.5 * math.log(2 * math.pi)


def _scalar_out(x, like):
    return complex(x) if np.ndim(like) == 0 else x


def _lanczos_parts(z):
    """A and A'/A, A''/A, A'''/A for the Lanczos sum at z' = z - 1 (z an array)."""
    zp = z - 1.0
    k = np.arange(1, _C.size)
    d = zp[..., None] + k
    inv = _C[1:] / d
    A = _C[0] + inv.sum(axis=-1)
    A1 = -(inv / d).sum(axis=-1)
    A2 = 2 * (inv / d**2).sum(axis=-1)
    A3 = -6 * (inv / d**3).sum(axis=-1)
    return zp, A, A1 / A, A2 / A, A3 / A


def sinpi(x):
    """sin(pi x) for complex x, exactly zero at integer real parts with zero imaginary part."""
    x = np.asarray(x, dtype=complex)
    xr, xi = x.real, x.imag
    r = np.remainder(xr, 2.0)
    s_r = np.sin(np.pi * r)
    c_r = np.cos(np.pi * r)
    s_r = np.where(r % 1.0 == 0, 0.0, s_r)
    c_r = np.where((r - 0.5) % 1.0 == 0, 0.0, c_r)
    out = s_r * np.cosh(np.pi * xi) + 1j * c_r * np.sinh(np.pi * xi)
    return _scalar_out(out, x)


def cospi(x):
    """cos(pi x) for complex x, exactly zero at half-integers on the real line."""
    x = np.asarray(x, dtype=complex)
    return sinpi(x + 0.5) if np.ndim(x) == 0 else np.asarray(sinpi(x + 0.5))


def log_sinpi(x):
    """A logarithm of sin(pi x) that stays finite for large |Im x|."""
    x = np.asarray(x, dtype=complex)
    y = x.imag
    with np.errstate(divide="ignore", invalid="ignore"):
        small = np.log(np.asarray(sinpi(x), dtype=complex))
        w = np.pi * x
        # sin w = (i/2) e^{-i w} (1 - e^{2 i w})  for Im w > 0
        up = -1j * w + np.log(0.5j) + np.log1p(-np.exp(2j * w))
        down = 1j * w + np.log(-0.5j) + np.log1p(-np.exp(-2j * w))
    out = np.where(np.abs(y) < 20, small, np.where(y > 0, up, down))
    return _scalar_out(out, x)


def loggamma(z):
    z = np.asarray(z, dtype=complex)
    zz = np.atleast_1d(z)
    out = np.empty_like(zz)
    right = zz.real >= 0.5
    if np.any(right):
        zp, A, _, _, _ = _lanczos_parts(zz[right])
        t = zp + _G + 0.5
        out[right] = _HALF_LOG_2PI + (zp + 0.5) * np.log(t) - t + np.log(A)
    if np.any(~right):
        zl = zz[~right]
        out[~right] = math.log(math.pi) - np.asarray(log_sinpi(zl)) - loggamma(1.0 - zl)
    return _scalar_out(out.reshape(z.shape), z)


def gamma(z):
    return np.exp(loggamma(z)) if np.ndim(z) else complex(np.exp(loggamma(z)))


def digamma(z):
    z = np.asarray(z, dtype=complex)
    zz = np.atleast_1d(z)
    out = np.empty_like(zz)
    right = zz.real >= 0.5
    if np.any(right):
        zp, _, r1, _, _ = _lanczos_parts(zz[right])
        t = zp + _G + 0.5
        out[right] = np.log(t) - _G / t + r1
    if np.any(~right):
        zl = zz[~right]
        out[~right] = digamma(1.0 - zl) - np.pi * np.asarray(cospi(zl)) / np.asarray(sinpi(zl))
    return _scalar_out(out.reshape(z.shape), z)


def trigamma(z):
    z = np.asarray(z, dtype=complex)
    zz = np.atleast_1d(z)
    out = np.empty_like(zz)
    right = zz.real >= 0.5
    if np.any(right):
        zp, _, r1, r2, _ = _lanczos_parts(zz[right])
        t = zp + _G + 0.5
        out[right] = 1.0 / t + _G / t**2 + r2 - r1**2
    if np.any(~right):
        zl = zz[~right]
        out[~right] = -trigamma(1.0 - zl) + np.pi**2 / np.asarray(sinpi(zl)) ** 2
    return _scalar_out(out.reshape(z.shape), z)


def tetragamma(z):
    """Second derivative of the digamma function."""
    z = np.asarray(z, dtype=complex)
    zz = np.atleast_1d(z)
    out = np.empty_like(zz)
    right = zz.real >= 0.5
    if np.any(right):
        zp, _, r1, r2, r3 = _lanczos_parts(zz[right])
        t = zp + _G + 0.5
        out[right] = -1.0 / t**2 - 2 * _G / t**3 + r3 - 3 * r2 * r1 + 2 * r1**3
    if np.any(~right):
        zl = zz[~right]
        sp = np.asarray(sinpi(zl))
        cp = np.asarray(cospi(zl))
        out[~right] = tetragamma(1.0 - zl) - 2 * np.pi**3 * cp / sp**3
    return _scalar_out(out.reshape(z.shape), z)
