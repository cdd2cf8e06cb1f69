"""General Dirichlet series: representation, convergence estimates, evaluation.

A series is stored as a finite prefix of exponents ``lambdas`` and
coefficients ``coefficients`` and represents

    sum_n a_n * exp(-lambda_n * s).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from .characters import DirichletCharacter, dirichlet_character
from .errors import (
    AllZero,
    AllZeroTail,
    BadBaseAbscissa,
    TruncationTooSmall,
    ValidationError,
)
from .summation import csum

TAIL_FRACTION = 0.2


@dataclass(frozen=True, eq=False)
class GeneralDirichletSeries:
    lambdas: np.ndarray
    coefficients: np.ndarray
    label: str = ""

    def __post_init__(self):
        lam = np.array(self.lambdas, dtype=float)
        coef = np.array(self.coefficients, dtype=complex)
        if lam.ndim != 1 or coef.ndim != 1:
            raise ValidationError("lambdas and coefficients must be 1-D")
        if lam.shape != coef.shape:
            raise ValidationError(
                f"lambdas ({lam.size}) and coefficients ({coef.size}) differ in length"
            )
        if lam.size == 0:
            raise ValidationError("series needs at least one term")
        if np.any(np.diff(lam) < 0):
            raise ValidationError("lambdas must be nondecreasing")
        if not np.all(np.isfinite(lam)) or not np.all(np.isfinite(coef)):
            raise ValidationError("non-finite exponent or coefficient")
        lam.flags.writeable = False
        coef.flags.writeable = False
        object.__setattr__(self, "lambdas", lam)
        object.__setattr__(self, "coefficients", coef)

    def __len__(self) -> int:
        return self.lambdas.size

    @property
    def is_normalized(self) -> bool:
        return self.lambdas[0] == 0.0 and self.coefficients[0] == 1.0

    @property
    def is_proper(self) -> bool:
        """Truncation proxy for lambda_n -> inf with infinitely many a_n != 0."""
        return bool(self.lambdas[-1] > self.lambdas[0] and np.any(self.coefficients[1:] != 0))

    @property
    def real_coefficients(self) -> bool:
        return bool(np.all(self.coefficients.imag == 0))

    def truncate(self, n: int) -> "GeneralDirichletSeries":
        return GeneralDirichletSeries(self.lambdas[:n], self.coefficients[:n], self.label)

    def same_as(self, other: "GeneralDirichletSeries") -> bool:
        return (
            np.array_equal(self.lambdas, other.lambdas)
            and np.array_equal(self.coefficients, other.coefficients)
            and self.label == other.label
        )

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "terms": [[float(l), float(a.real), float(a.imag)] for l, a in zip(self.lambdas, self.coefficients)],
        }


@dataclass(frozen=True)
class ConvergenceReport:
    sigma_c_estimate: float
    sigma_a_estimate: float
    hadamard_radius: float | None
    n_used: int

    def to_json(self) -> dict:
        r = self.hadamard_radius
        return {
            "sigma_c_estimate": self.sigma_c_estimate,
            "sigma_a_estimate": self.sigma_a_estimate,
            "hadamard_radius": None if r is None else ("inf" if math.isinf(r) else r),
            "n_used": self.n_used,
        }


# ---------------------------------------------------------------- abscissas


def _tail_window(n_max: int) -> slice:
    start = max(1, int(math.floor((1 - TAIL_FRACTION) * n_max)))
    return slice(start - 1, n_max)  # 0-based, inclusive of n_max


def _check_tail(series: GeneralDirichletSeries, n_max: int) -> None:
    if n_max < 2:
        raise ValidationError("n_max must be >= 2")
    if n_max > len(series):
        raise ValidationError(f"n_max={n_max} exceeds stored length {len(series)}")
    if series.lambdas[n_max - 1] <= 0:
        raise ValidationError("lambda_{n_max} must be positive")
    if not np.any(series.coefficients[1:n_max] != 0):
        raise AllZeroTail("coefficients beyond index 1 vanish within n_max")


def _limsup_ratio(numerator_logs: np.ndarray, lambdas: np.ndarray, n_max: int) -> float:
    win = _tail_window(n_max)
    lam = lambdas[win]
    logs = numerator_logs[win]
    ok = lam > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = logs[ok] / lam[ok]
    ratios = ratios[np.isfinite(ratios)]
    if ratios.size == 0:
        return 0.0
    # the cited formulas are only valid when the series diverges at s = 0
    return max(0.0, float(ratios.max()))


def abscissa_abs(series: GeneralDirichletSeries, n_max: int | None = None) -> float:
    """Estimate sigma_a = limsup ln(sum_{k<=n} |a_k|) / lambda_n.

    The limsup is approximated by the maximum over the last 20% of indices up
    to ``n_max``; this is an estimate, not a certified value.
    """
    n_max = len(series) if n_max is None else n_max
    _check_tail(series, n_max)
    partial = np.cumsum(np.abs(series.coefficients[:n_max]))
    with np.errstate(divide="ignore"):
        logs = np.log(partial)
    return _limsup_ratio(logs, series.lambdas, n_max)


def abscissa_conv(series: GeneralDirichletSeries, n_max: int | None = None) -> float:
    """Estimate sigma_c = limsup ln|sum_{k<=n} a_k| / lambda_n.

    Valid in the regime where the series diverges at s = 0; when the partial
    sums stay bounded the estimate is 0.
    """
    n_max = len(series) if n_max is None else n_max
    _check_tail(series, n_max)
    partial = np.abs(np.cumsum(series.coefficients[:n_max]))
    with np.errstate(divide="ignore"):
        logs = np.log(partial)
    return _limsup_ratio(logs, series.lambdas, n_max)


def hadamard_radius(coefficients: Sequence[complex], n_max: int | None = None) -> float:
    """1 / limsup |a_n|^(1/n) for power-series coefficients a_0, a_1, ...

    Returns ``math.inf`` when the limsup estimate is 0.
    """
    coef = np.asarray(coefficients, dtype=complex)
    n_max = coef.size - 1 if n_max is None else n_max
    if n_max < 2:
        raise ValidationError("n_max must be >= 2")
    if n_max > coef.size - 1:
        raise ValidationError(f"n_max={n_max} exceeds highest stored index {coef.size - 1}")
    start = max(1, int(math.floor((1 - TAIL_FRACTION) * n_max)))
    n = np.arange(start, n_max + 1)
    mags = np.abs(coef[start : n_max + 1])
    with np.errstate(divide="ignore"):
        roots = np.exp(np.log(mags) / n)
    limsup = float(roots.max())
    if limsup == 0.0:
        return math.inf
    return 1.0 / limsup


def convergence_report(series: GeneralDirichletSeries, n_max: int | None = None) -> ConvergenceReport:
    n_max = len(series) if n_max is None else n_max
    radius = None
    lam = series.lambdas[:n_max]
    if np.array_equal(lam, np.arange(n_max, dtype=float)):
        radius = hadamard_radius(series.coefficients[:n_max], n_max - 1)
    return ConvergenceReport(
        sigma_c_estimate=abscissa_conv(series, n_max),
        sigma_a_estimate=abscissa_abs(series, n_max),
        hadamard_radius=radius,
        n_used=n_max,
    )


# ---------------------------------------------------------------- normalization and evaluation


def normalize_leading(series: GeneralDirichletSeries) -> GeneralDirichletSeries:
    """Return exp(lambda_m s)/a_m * series, with a_m the first nonzero coefficient."""
    nz = np.flatnonzero(series.coefficients != 0)
    if nz.size == 0:
        raise AllZero("series has no nonzero coefficient")
    m = nz[0]
    lam = series.lambdas[m:] - series.lambdas[m]
    coef = series.coefficients[m:] / series.coefficients[m]
    coef[0] = 1.0
    return GeneralDirichletSeries(lam, coef, series.label)


def eval_partial(series: GeneralDirichletSeries, s, N: int | None = None):
    """sum_{n<=N} a_n exp(-lambda_n s) with compensated summation.

    ``s`` may be a scalar or an array; the result has the same shape.
    """
    N = len(series) if N is None else N
    if not 1 <= N <= len(series):
        raise ValidationError(f"N={N} outside 1..{len(series)}")
    lam = series.lambdas[:N]
    coef = series.coefficients[:N]
    s_arr = np.asarray(s, dtype=complex)
    if s_arr.ndim == 0:
        return csum(coef * np.exp(-lam * complex(s_arr)))
    flat = s_arr.reshape(-1, 1)
    terms = coef[None, :] * np.exp(-lam[None, :] * flat)
    return csum(terms).reshape(s_arr.shape)


def tail_bound(series: GeneralDirichletSeries, sigma: float, sigma0: float, N: int | None = None) -> float:
    """Uniform bound C * exp(-lambda_2 sigma) on |series(sigma + it) - 1|.

    C = exp(lambda_2 sigma0) * sum_{n>=2} |a_n| exp(-lambda_n sigma0), truncated
    at the stored length (or ``N``).  Valid for sigma >= sigma0 > sigma_a.
    """
    ser = normalize_leading(series)
    N = len(ser) if N is None else min(N, len(ser))
    sigma_a = abscissa_abs(ser, N)
    if not sigma0 > sigma_a:
        raise BadBaseAbscissa(f"sigma0={sigma0} is not above the sigma_a estimate {sigma_a}")
    if sigma < sigma0:
        raise ValidationError("sigma must be >= sigma0")
    lam2 = ser.lambdas[1]
    if lam2 <= 0:
        raise ValidationError("lambda_2 must be positive after normalization")
    lam = ser.lambdas[1:N]
    mags = np.abs(ser.coefficients[1:N])
    # exp(lambda_2 sigma0) is folded into the sum to avoid overflow
    C = math.fsum(mags * np.exp(-(lam - lam2) * sigma0))
    return C * math.exp(-lam2 * sigma)


# ---------------------------------------------------------------- generators


def dirichlet_series(coefficients: Sequence[complex], label: str = "") -> GeneralDirichletSeries:
    """Ordinary Dirichlet series sum a_n n^{-s}, n = 1..len(coefficients)."""
    n = np.arange(1, len(coefficients) + 1)
    return GeneralDirichletSeries(np.log(n), coefficients, label)


def zeta_series(n_terms: int = 10_000) -> GeneralDirichletSeries:
    return dirichlet_series(np.ones(n_terms), "zeta")


def eta_series(n_terms: int = 10_000) -> GeneralDirichletSeries:
    n = np.arange(1, n_terms + 1)
    return dirichlet_series(np.where(n % 2 == 1, 1.0, -1.0), "eta")


def dirichlet_l_series(chi: DirichletCharacter, n_terms: int = 10_000) -> GeneralDirichletSeries:
    n = np.arange(1, n_terms + 1)
    return dirichlet_series(chi.values[n % chi.modulus], f"L(s, chi_{chi.modulus}#{chi.index})")


def from_power_series(coefficients: Sequence[complex], z0: complex = 0) -> GeneralDirichletSeries:
    """Convert sum a_n (z - z0)^n into sum a_n exp(-n s) via z - z0 = exp(-s).

    Absolute convergence holds for sigma > ln(1/R), R the Hadamard radius.
    """
    coef = np.asarray(coefficients, dtype=complex)
    if coef.size == 0:
        raise ValidationError("coefficient list must be nonempty")
    label = "power" if z0 == 0 else f"power@{complex(z0)}"
    return GeneralDirichletSeries(np.arange(coef.size, dtype=float), coef, label)


def hadamard_gap_series(levels: int) -> GeneralDirichletSeries:
    """Truncation of 1 + sum_{n=0}^{levels} exp(-2^n s)."""
    if levels < 1:
        raise ValidationError("levels must be >= 1")
    lam = [0.0] + [float(2**n) for n in range(levels + 1)]
    return GeneralDirichletSeries(lam, np.ones(len(lam)), f"hadamard-gap({levels})")


def blaschke_zeros(n_levels: int) -> np.ndarray:
    """a_{n,k} = (1 - 3^-n) exp(2 k pi i / 2^n), n = 1..n_levels, k = 1..2^n."""
    zs = []
    for n in range(1, n_levels + 1):
        k = np.arange(1, 2**n + 1)
        zs.append((1 - 3.0**-n) * np.exp(2j * np.pi * k / 2**n))
    return np.concatenate(zs)


def blaschke_zero_sum(n_levels: int) -> float:
    """sum_{n,k} (1 - |a_{n,k}|) = sum_n (2/3)^n, without forming the zeros."""
    return math.fsum(2.0**n * 3.0**-n for n in range(1, n_levels + 1))


def blaschke_factor_series(a: complex, m_trunc: int) -> np.ndarray:
    """Taylor coefficients of (z - a)/(1 - conj(a) z) up to degree m_trunc."""
    out = np.empty(m_trunc + 1, dtype=complex)
    out[0] = -a
    if m_trunc >= 1:
        j = np.arange(1, m_trunc + 1)
        out[1:] = (1 - abs(a) ** 2) * np.conj(a) ** (j - 1)
    return out


def blaschke_product_coefficients(zeros: Sequence[complex], m_trunc: int) -> np.ndarray:
    """Truncated power series of prod (z - a)/(1 - conj(a) z)."""
    acc = np.zeros(m_trunc + 1, dtype=complex)
    acc[0] = 1.0
    for a in zeros:
        acc = np.convolve(acc, blaschke_factor_series(a, m_trunc))[: m_trunc + 1]
    return acc


def blaschke_coefficients(n_levels: int, m_trunc: int) -> tuple[np.ndarray, float]:
    """Coefficients alpha_0..alpha_{m_trunc} of the finite Blaschke product and
    the zero-sum check sum(1 - |a_{n,k}|)."""
    if n_levels < 1 or m_trunc < 1:
        raise ValidationError("n_levels and m_trunc must be >= 1")
    zeros = blaschke_zeros(n_levels)
    if m_trunc < zeros.size:
        raise TruncationTooSmall(f"m_trunc={m_trunc} < number of factors {zeros.size}")
    return blaschke_product_coefficients(zeros, m_trunc), math.fsum(1 - np.abs(zeros))


# ---------------------------------------------------------------- JSON


def series_from_json(doc: dict[str, Any]) -> GeneralDirichletSeries:
    """Build a series from ``{"label", "terms": [[lambda, re, im], ...]}`` or a
    ``{"kind": ...}`` generator document."""
    if "terms" in doc:
        terms = doc["terms"]
        try:
            lam = [float(t[0]) for t in terms]
            coef = [complex(float(t[1]), float(t[2]) if len(t) > 2 else 0.0) for t in terms]
        except (TypeError, ValueError, IndexError) as exc:
            raise ValidationError(f"bad term entry: {exc}") from None
        return GeneralDirichletSeries(lam, coef, doc.get("label", ""))
    kind = doc.get("kind")
    n_terms = int(doc.get("n_terms", 10_000))
    if kind == "zeta":
        return zeta_series(n_terms)
    if kind == "eta":
        return eta_series(n_terms)
    if kind == "dirichlet-l":
        chi = dirichlet_character(int(doc["modulus"]), int(doc.get("character_index", 1)))
        return dirichlet_l_series(chi, n_terms)
    if kind == "power":
        coef = [complex(c[0], c[1]) if isinstance(c, (list, tuple)) else complex(c) for c in doc["coefficients"]]
        z0 = doc.get("z0", 0)
        z0 = complex(z0[0], z0[1]) if isinstance(z0, (list, tuple)) else complex(z0)
        return from_power_series(coef, z0)
    if kind == "hadamard-gap":
        return hadamard_gap_series(int(doc["levels"]))
    if kind == "blaschke":
        alphas, _ = blaschke_coefficients(int(doc["n_levels"]), int(doc["m_trunc"]))
        return GeneralDirichletSeries(np.arange(alphas.size, dtype=float), alphas, "blaschke")
    raise ValidationError(f"unknown series kind {kind!r}")
