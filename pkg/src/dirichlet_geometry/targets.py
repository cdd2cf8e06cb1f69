"""Analytically continued evaluation targets: Riemann zeta, Dirichlet
L-functions, Dirichlet polynomials, and generic callables.

Every target exposes a *jet*: the value and the first few derivatives at one
or many points.  Geometric code (lifting, zero finding, the atlas) only talks
to targets through :class:`AnalyticTarget`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from . import gamma as _g
from .characters import DirichletCharacter, dirichlet_character
from .errors import AccuracyWindowExceeded, NotNormalized, OverflowGuard, PoleAt1, ValidationError
from .series import GeneralDirichletSeries, dirichlet_l_series, normalize_leading, series_from_json, zeta_series
from .summation import csum

MAX_ORDER = 3
LOG_2PI = math.log(2 * math.pi)
LOG_PI = math.log(math.pi)

JetFn = Callable[[np.ndarray, int], list]


# ---------------------------------------------------------------- target type


@dataclass(frozen=True, eq=False)
class AnalyticTarget:
    """A uniformly evaluable meromorphic function with derivatives.

    ``jet_fn(s, order)`` receives a 1-D complex array and returns a list of
    ``order + 1`` arrays: f, f', ..., f^(order).
    """

    label: str
    jet_fn: JetFn
    poles: tuple[tuple[complex, int], ...] = ()
    multiplier: Callable | None = None
    multiplier_zeros: Callable[[float, float], list] | None = None
    sigma_a: float = math.inf
    series: GeneralDirichletSeries | None = None
    real_coefficients: bool = False
    max_order: int = MAX_ORDER
    # asymptotic data f ~ 1 + a2 exp(-lambda2 s) used to seed the Gamma' curves
    lambda2: float | None = None
    a2: complex | None = None
    sigma_min: float = -math.inf
    t_max: float = math.inf

    def jet(self, s, order: int = 1):
        if order > self.max_order:
            raise ValidationError(f"{self.label}: derivative order {order} not available")
        arr = np.asarray(s, dtype=complex)
        flat = np.atleast_1d(arr).ravel()
        out = self.jet_fn(flat, order)
        if arr.ndim == 0:
            return tuple(complex(x[0]) for x in out)
        return tuple(np.asarray(x).reshape(arr.shape) for x in out)

    def eval(self, s):
        return self.jet(s, 0)[0]

    def deriv(self, s):
        return self.jet(s, 1)[1]

    def deriv2(self, s):
        return self.jet(s, 2)[2]

    __call__ = eval

    def derivative(self) -> "AnalyticTarget":
        """The target s -> f'(s); its multiplier and seeds are dropped."""
        base = self.jet_fn

        def jet_fn(s, order):
            return base(s, order + 1)[1:]

        return AnalyticTarget(
            label=f"{self.label}'",
            jet_fn=jet_fn,
            poles=tuple((p, m + 1) for p, m in self.poles),
            sigma_a=self.sigma_a,
            real_coefficients=self.real_coefficients,
            max_order=self.max_order - 1,
            sigma_min=self.sigma_min,
            t_max=self.t_max,
        )

    def in_window(self, s) -> bool:
        s = complex(s)
        return s.real >= self.sigma_min and abs(s.imag) <= self.t_max


# ---------------------------------------------------------------- Euler-Maclaurin engine


@lru_cache(maxsize=None)
def _bernoulli_over_factorial(K: int) -> tuple[float, ...]:
    """B_{2k}/(2k)! for k = 1..K from the standard recurrence, exactly."""
    B = [Fraction(1)]
    for m in range(1, 2 * K + 1):
        acc = Fraction(0)
        for j in range(m):
            acc += Fraction(math.comb(m + 1, j)) * B[j]
        B.append(-acc / (m + 1))
    return tuple(float(B[2 * k] / math.factorial(2 * k)) for k in range(1, K + 1))


def _rowsum(terms: np.ndarray) -> np.ndarray:
    if terms.shape[0] == 1:
        return np.array([csum(terms[0])])
    return np.asarray(csum(terms))


def _log_jets(E: np.ndarray, L, order: int) -> list:
    """Derivatives of y^{-s} = E: (-ln y)^j E."""
    out = [E]
    for _ in range(order):
        out.append(out[-1] * (-L))
    return out


def _pole_jets(u: np.ndarray, L: float, order: int, regularized: bool) -> list:
    """Jets in s of y^{1-s}/(s-1), or (y^{1-s} - 1)/(s-1) if regularized; u = s - 1, L = ln y."""
    out = []
    e = np.exp(-u * L)
    small = np.abs(u * L) < 0.5
    for j in range(order + 1):
        direct = np.zeros_like(u)
        with np.errstate(divide="ignore", invalid="ignore"):
            for i in range(j + 1):
                direct = direct + math.comb(j, i) * (-L) ** (j - i) * e * (-1) ** i * math.factorial(i) / u ** (i + 1)
            if regularized:
                direct = direct - (-1) ** j * math.factorial(j) / u ** (j + 1)
        if regularized and np.any(small):
            # (e^{-uL} - 1)/u = sum_{m>=1} (-L)^m u^{m-1} / m!
            us = u[small]
            ser = np.zeros_like(us)
            for m in range(j + 1, j + 41):
                ser = ser + (-L) ** m / math.factorial(m) * math.perm(m - 1, j) * us ** (m - 1 - j)
            direct = np.where(small, 0, direct)
            direct[small] = ser
        out.append(direct)
    return out


def _poch_jets(s: np.ndarray, K: int, order: int) -> np.ndarray:
    """Array P[k-1, i] = i-th derivative of s (s+1) ... (s+2k-2), k = 1..K."""
    if s.size == 1:
        # plain complex arithmetic is far cheaper than numpy on one point
        z = complex(s[0])
        P = [z] + [1.0 if i == 1 else 0.0 for i in range(1, order + 1)]
        rows = [list(P)]
        for k in range(2, K + 1):
            for c in (2 * k - 3, 2 * k - 2):
                lin = z + c
                P = [P[i] * lin + (i * P[i - 1] if i else 0) for i in range(order + 1)]
            rows.append(P)
        return np.array(rows, dtype=complex)[:, :, None]
    out = np.zeros((K, order + 1, s.size), dtype=complex)
    P = [s.copy()] + [np.ones_like(s) if i == 1 else np.zeros_like(s) for i in range(1, order + 1)]
    out[0] = P
    for k in range(2, K + 1):
        for c in (2 * k - 3, 2 * k - 2):
            lin = s + c
            P = [P[i] * lin + (i * P[i - 1] if i else 0) for i in range(order + 1)]
        out[k - 1] = P
    return out


def em_sum(s: np.ndarray, weights: Sequence[complex], q: int, order: int, N: int, K: int) -> list:
    """Jets of sum_{m>=1} w(m mod q) m^{-s} by Euler-Maclaurin per residue class.

    ``weights[a]`` is w(a) for a = 0..q-1.  Direct terms cover m <= qN, the
    tail of each residue class a starts at x_a = qN + a.
    """
    weights = np.asarray(weights, dtype=complex)
    m = np.arange(1, q * N + 1)
    w = weights[m % q]
    keep = w != 0
    m, w = m[keep], w[keep]
    Lm = np.log(m)
    E = np.exp(-np.outer(s, Lm))
    base = E * w
    parts = [[] for _ in range(order + 1)]
    for j in range(order + 1):
        parts[j].append(_rowsum(base))
        base = base * (-Lm)
    total_w = weights.sum()
    regularized = abs(total_w) < 1e-12
    bern = _bernoulli_over_factorial(K)
    poch = _poch_jets(s, K, order)
    u = s - 1.0
    for a in range(1, q + 1):
        wa = weights[a % q]
        if wa == 0:
            continue
        x = q * N + a
        Lx = math.log(x)
        Ex = np.exp(-s * Lx)
        ej = _log_jets(Ex, Lx, order)
        pj = _pole_jets(u, Lx, order, regularized)
        ks = np.arange(1, K + 1)
        coef = np.asarray(bern) * float(q) ** (2 * ks - 1) * float(x) ** (1 - 2 * ks)
        Q = np.tensordot(coef, poch, axes=1)  # Q[i] = sum_k coef_k P_k^(i)
        for j in range(order + 1):
            tail = pj[j] / q + 0.5 * ej[j]
            for i in range(j + 1):
                tail = tail + math.comb(j, i) * Q[i] * ej[j - i]
            parts[j].append(wa * tail)
    return [_rowsum(np.stack(p, axis=-1)) for p in parts]


def _default_N(s: np.ndarray, N: int | None) -> int:
    if N is not None:
        return N
    t = float(np.max(np.abs(s.imag))) if s.size else 0.0
    return max(50, int(math.ceil(2 * t)))


# ---------------------------------------------------------------- zeta and the multiplier

REFLECT_BELOW = -1.0
ZETA_SIGMA_MIN = -12.0
ZETA_T_MAX = 120.0


def _check_window(s: np.ndarray, sigma_min: float, t_max: float, label: str) -> None:
    if s.size and (np.min(s.real) < sigma_min or np.max(np.abs(s.imag)) > t_max):
        raise AccuracyWindowExceeded(
            f"{label}: evaluation outside validated window sigma >= {sigma_min}, |t| <= {t_max}"
        )


def _multiplier_jets(s: np.ndarray, order: int) -> list:
    """Jets of M(s) = 2^s pi^(s-1) sin(pi s/2) Gamma(1-s) = G(s) S(s)."""
    one_minus = 1.0 - s
    G = np.exp(s * LOG_2PI - LOG_PI + _g.loggamma(one_minus))
    g = [None, LOG_2PI - _g.digamma(one_minus), _g.trigamma(one_minus), -_g.tetragamma(one_minus)]
    Gj = [G]
    if order >= 1:
        Gj.append(G * g[1])
    if order >= 2:
        Gj.append(G * (g[2] + g[1] ** 2))
    if order >= 3:
        Gj.append(G * (g[3] + 3 * g[1] * g[2] + g[1] ** 3))
    half = s / 2
    S0 = np.asarray(_g.sinpi(half))
    C0 = np.asarray(_g.cospi(half))
    h = math.pi / 2
    Sj = [S0, h * C0, -(h**2) * S0, -(h**3) * C0][: order + 1]
    return [sum(math.comb(j, i) * Gj[i] * Sj[j - i] for i in range(j + 1)) for j in range(order + 1)]


def zeta_jet(s, order: int = 0, N: int | None = None, K: int = 12) -> list:
    """Jets of the Riemann zeta function on a 1-D array ``s``.

    Euler-Maclaurin for Re s >= -1, the functional equation below that.
    """
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    if np.any(np.abs(s - 1) < 1e-12):
        raise PoleAt1("zeta has a pole at s = 1")
    out = [np.empty_like(s) for _ in range(order + 1)]
    direct = s.real >= REFLECT_BELOW
    if np.any(direct):
        sd = s[direct]
        vals = em_sum(sd, [1.0], 1, order, _default_N(sd, N), K)
        for j in range(order + 1):
            out[j][direct] = vals[j]
    if np.any(~direct):
        sr = s[~direct]
        Mj = _multiplier_jets(sr, order)
        Z = em_sum(1.0 - sr, [1.0], 1, order, _default_N(sr, N), K)
        for j in range(order + 1):
            out[j][~direct] = sum(math.comb(j, i) * Mj[i] * (-1) ** (j - i) * Z[j - i] for i in range(j + 1))
    return out


def zeta_multiplier(s):
    """M(s) with zeta(s) = M(s) zeta(1 - s), evaluated in log space.

    Uses 2^s pi^(s-1) sin(pi s/2) Gamma(1-s) for Re s < 1/2 and the equivalent
    (2 pi)^s / (2 cos(pi s/2) Gamma(s)) otherwise.  Exactly zero at s = -2, -4, ...
    """
    arr = np.asarray(s, dtype=complex)
    z = np.atleast_1d(arr).ravel()
    out = np.empty_like(z)
    left = z.real < 0.5
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if np.any(left):
            zl = z[left]
            logm = zl * math.log(2) + (zl - 1) * LOG_PI + _g.log_sinpi(zl / 2) + _g.loggamma(1 - zl)
            out[left] = _exp_guarded(logm)
        if np.any(~left):
            zr = z[~left]
            c = np.asarray(_g.cospi(zr / 2))
            if np.any(c == 0):
                raise PoleAt1("multiplier pole at an odd positive integer")
            logm = zr * LOG_2PI - math.log(2) - _g.log_sinpi(zr / 2 + 0.5) - _g.loggamma(zr)
            out[~left] = _exp_guarded(logm)
    return complex(out[0]) if arr.ndim == 0 else out.reshape(arr.shape)


def _exp_guarded(logm: np.ndarray) -> np.ndarray:
    logm = np.asarray(logm)
    finite = np.isfinite(logm.real)
    if np.any(finite & (logm.real > 700)):
        raise OverflowGuard("multiplier modulus exceeds the double range")
    out = np.zeros(logm.shape, dtype=complex)
    out[finite] = np.exp(logm[finite])
    return out


def zeta_trivial_zeros(sigma_min: float, sigma_max: float) -> list[complex]:
    """Zeros of the zeta multiplier in [sigma_min, sigma_max]: -2, -4, ..."""
    k_hi = int(math.floor(-sigma_min / 2)) if sigma_min < 0 else 0
    return [complex(-2 * k) for k in range(1, k_hi + 1) if sigma_min <= -2 * k <= sigma_max]


def riemann_zeta(s, terms_N: int | None = None, bernoulli_K: int = 12):
    """Riemann zeta via Euler-Maclaurin; validated for sigma >= -12, |t| <= 120."""
    return _checked_zeta(s, 0, terms_N, bernoulli_K)[0]


def riemann_zeta_deriv(s, terms_N: int | None = None, bernoulli_K: int = 12):
    return _checked_zeta(s, 1, terms_N, bernoulli_K)[1]


def riemann_zeta_deriv2(s, terms_N: int | None = None, bernoulli_K: int = 12):
    return _checked_zeta(s, 2, terms_N, bernoulli_K)[2]


def _checked_zeta(s, order, N, K):
    arr = np.asarray(s, dtype=complex)
    flat = np.atleast_1d(arr).ravel()
    if np.any(np.abs(flat - 1) < 1e-12):
        raise PoleAt1("zeta has a pole at s = 1")
    _check_window(flat, ZETA_SIGMA_MIN, ZETA_T_MAX, "zeta")
    out = zeta_jet(flat, order, N, K)
    if arr.ndim == 0:
        return [complex(x[0]) for x in out]
    return [x.reshape(arr.shape) for x in out]


def zeta_target(terms_N: int | None = None, bernoulli_K: int = 12) -> AnalyticTarget:
    def jet_fn(s, order):
        _check_window(s, ZETA_SIGMA_MIN, ZETA_T_MAX, "zeta")
        return zeta_jet(s, order, terms_N, bernoulli_K)

    return AnalyticTarget(
        label="zeta",
        jet_fn=jet_fn,
        poles=((1 + 0j, 1),),
        multiplier=zeta_multiplier,
        multiplier_zeros=zeta_trivial_zeros,
        sigma_a=1.0,
        series=zeta_series(10_000),
        real_coefficients=True,
        lambda2=math.log(2),
        a2=1.0,
        sigma_min=ZETA_SIGMA_MIN,
        t_max=ZETA_T_MAX,
    )


# ---------------------------------------------------------------- Dirichlet L-functions

L_SIGMA_MIN = -1.0


def dirichlet_l(s, chi: DirichletCharacter, terms_N: int | None = None, bernoulli_K: int = 12, order: int = 0):
    """L(s, chi) = q^{-s} sum_a chi(a) zeta_H(s, a/q) by Euler-Maclaurin.

    No functional equation is used, so the validated window is sigma >= -1,
    |t| <= 120.  With ``order > 0`` the list of jets is returned instead.
    """
    arr = np.asarray(s, dtype=complex)
    flat = np.atleast_1d(arr).ravel()
    if chi.is_principal and np.any(np.abs(flat - 1) < 1e-12):
        raise PoleAt1("principal L-function has a pole at s = 1")
    _check_window(flat, L_SIGMA_MIN, ZETA_T_MAX, "L")
    out = em_sum(flat, chi.values, chi.modulus, order, _default_N(flat, terms_N), bernoulli_K)
    if order == 0:
        return complex(out[0][0]) if arr.ndim == 0 else out[0].reshape(arr.shape)
    return [complex(x[0]) if arr.ndim == 0 else x.reshape(arr.shape) for x in out]


def dirichlet_l_target(chi: DirichletCharacter, terms_N: int | None = None, bernoulli_K: int = 12) -> AnalyticTarget:
    def jet_fn(s, order):
        _check_window(s, L_SIGMA_MIN, ZETA_T_MAX, "L")
        return em_sum(s, chi.values, chi.modulus, order, _default_N(s, terms_N), bernoulli_K)

    ser = dirichlet_l_series(chi, 10_000)
    # first n >= 2 with chi(n) != 0 gives the asymptotic seed data
    n2 = next(n for n in range(2, 10 * chi.modulus + 3) if chi(n) != 0)
    return AnalyticTarget(
        label=f"L(s, chi_{chi.modulus}#{chi.index})",
        jet_fn=jet_fn,
        poles=((1 + 0j, 1),) if chi.is_principal else (),
        sigma_a=1.0,
        series=ser,
        real_coefficients=chi.is_real,
        lambda2=math.log(n2),
        a2=chi(n2),
        sigma_min=L_SIGMA_MIN,
        t_max=ZETA_T_MAX,
    )


# ---------------------------------------------------------------- Dirichlet polynomials and generic targets


def dirichlet_polynomial_target(series: GeneralDirichletSeries) -> AnalyticTarget:
    """Exact target for a finite series with a_1 = 1, lambda_1 = 0."""
    if not series.is_normalized:
        raise NotNormalized("dirichlet polynomial target needs a_1 = 1 and lambda_1 = 0")
    lam = series.lambdas
    coef = series.coefficients

    def jet_fn(s, order):
        with np.errstate(over="raise", invalid="raise"):
            try:
                base = coef[None, :] * np.exp(-np.outer(s, lam))
            except FloatingPointError:
                raise AccuracyWindowExceeded(f"{series.label}: overflow evaluating the polynomial") from None
        out = []
        for _ in range(order + 1):
            out.append(_rowsum(base))
            base = base * (-lam)
        return out

    nz = np.flatnonzero((coef != 0) & (lam > 0))
    lambda2 = float(lam[nz[0]]) if nz.size else None
    a2 = complex(coef[nz[0]]) if nz.size else None
    return AnalyticTarget(
        label=series.label or "dirichlet-polynomial",
        jet_fn=jet_fn,
        sigma_a=-math.inf,
        series=series,
        real_coefficients=series.real_coefficients,
        lambda2=lambda2,
        a2=a2,
    )


def polynomial_target(coefficients: Sequence[complex], label: str = "polynomial") -> AnalyticTarget:
    """Ordinary polynomial in s, coefficients from the constant term upwards."""
    p = np.polynomial.Polynomial(np.asarray(coefficients, dtype=complex))
    derivs = [p]
    for _ in range(MAX_ORDER):
        derivs.append(derivs[-1].deriv())

    def jet_fn(s, order):
        return [derivs[j](s) for j in range(order + 1)]

    return AnalyticTarget(
        label=label,
        jet_fn=jet_fn,
        real_coefficients=bool(np.all(np.asarray(coefficients, dtype=complex).imag == 0)),
    )


def callable_target(label: str, funcs: Sequence[Callable], poles=(), real_coefficients: bool = False) -> AnalyticTarget:
    """Target from explicit callables [f, f', f'', ...] (each vectorised)."""
    funcs = list(funcs)

    def jet_fn(s, order):
        return [np.asarray(funcs[j](s), dtype=complex) * np.ones_like(s) for j in range(order + 1)]

    return AnalyticTarget(
        label=label,
        jet_fn=jet_fn,
        poles=tuple(poles),
        real_coefficients=real_coefficients,
        max_order=len(funcs) - 1,
    )


def target_from_json(doc: dict) -> AnalyticTarget:
    kind = doc.get("kind")
    if kind == "zeta":
        return zeta_target(doc.get("terms_N"), int(doc.get("bernoulli_K", 12)))
    if kind == "dirichlet-l":
        chi = dirichlet_character(int(doc["modulus"]), int(doc.get("character_index", 1)))
        return dirichlet_l_target(chi, doc.get("terms_N"), int(doc.get("bernoulli_K", 12)))
    if kind == "polynomial":
        doc = {k: v for k, v in doc.items() if k != "kind"}
        return dirichlet_polynomial_target(normalize_leading(series_from_json(doc)))
    if kind is None and "terms" not in doc:
        raise ValidationError("target document needs a 'kind' or 'terms'")
    return dirichlet_polynomial_target(normalize_leading(series_from_json(doc)))
