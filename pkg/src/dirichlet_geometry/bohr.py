"""Bohr bases for the exponents and the lifted function F_B.

A basis B = (beta_1, beta_2, ...) with a matrix R of non-negative rational
rows gives lambda_n = sum_k r_nk beta_k.  The lift replaces s beta_k by an
independent coordinate z_k:

    F_B(z) = sum_n a_n exp(-sum_k r_nk z_k),   F_B(s B) = f(s).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DimensionMismatch, ValidationError
from .series import GeneralDirichletSeries
from .summation import csum

RECONSTRUCTION_TOL = 1e-12


def _primes_upto(n: int) -> list[int]:
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return [int(p) for p in np.flatnonzero(sieve)]


@dataclass(frozen=True)
class BohrBasis:
    betas: tuple[float, ...]
    rows: tuple[dict[int, Fraction], ...]  # rows[n - 1]: basis position -> entry
    n_max: int
    kind: str
    labels: tuple[str, ...] = ()

    @property
    def dimension(self) -> int:
        return len(self.betas)

    def row(self, n: int) -> np.ndarray:
        if not 1 <= n <= self.n_max:
            raise DimensionMismatch(f"row {n} outside 1..{self.n_max}")
        out = np.zeros(self.dimension)
        for k, v in self.rows[n - 1].items():
            out[k] = float(v)
        return out

    def matrix(self, N: int | None = None) -> np.ndarray:
        N = self.n_max if N is None else N
        return np.array([self.row(n) for n in range(1, N + 1)]).reshape(N, self.dimension)

    def exponents(self, N: int | None = None) -> np.ndarray:
        """(R B)_n, the exponents the basis reproduces."""
        return self.matrix(N) @ np.array(self.betas)

    def touched(self, N: int) -> int:
        """Number of leading coordinates used by rows 1..N."""
        used = [k for n in range(1, N + 1) for k in self.rows[n - 1]]
        return max(used) + 1 if used else 0

    def reconstruction_error(self, lambdas: np.ndarray) -> float:
        lam = np.asarray(lambdas, dtype=float)
        N = min(lam.size, self.n_max)
        return float(np.max(np.abs(lam[:N] - self.exponents(N)))) if N else 0.0

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "n_max": self.n_max,
            "betas": list(self.betas),
            "labels": list(self.labels),
            "rows": [{str(k): str(v) for k, v in sorted(r.items())} for r in self.rows],
        }


def prime_log_basis(n_max: int) -> BohrBasis:
    """Basis (log p) over the primes p <= n_max for lambda_n = log n; rows are exponent vectors."""
    if n_max < 2:
        raise ValidationError("n_max must be at least 2")
    primes = _primes_upto(n_max)
    pos = {p: i for i, p in enumerate(primes)}
    rows = [{}]
    for n in range(2, n_max + 1):
        row, m = {}, n
        for p in primes:
            if p * p > m:
                break
            while m % p == 0:
                row[pos[p]] = row.get(pos[p], 0) + 1
                m //= p
        if m > 1:
            row[pos[m]] = row.get(pos[m], 0) + 1
        rows.append({k: Fraction(v) for k, v in row.items()})
    return BohrBasis(tuple(math.log(p) for p in primes), tuple(rows), n_max, "prime-log", tuple(f"log {p}" for p in primes))


def shift_basis(n_max: int) -> BohrBasis:
    """Basis (1) for lambda_n = n - 1: row n is (n - 1)."""
    if n_max < 1:
        raise ValidationError("n_max must be at least 1")
    rows = tuple({0: Fraction(n - 1)} if n > 1 else {} for n in range(1, n_max + 1))
    return BohrBasis((1.0,), rows, n_max, "shift", ("1",))


def basis_for(series: GeneralDirichletSeries, n_max: int | None = None) -> BohrBasis:
    """Pick the constructive basis matching the series exponents, or refuse."""
    n_max = len(series) if n_max is None else min(n_max, len(series))
    for make in (prime_log_basis, shift_basis):
        if n_max < 2 and make is prime_log_basis:
            continue
        basis = make(n_max)
        if basis.reconstruction_error(series.lambdas[:n_max]) < RECONSTRUCTION_TOL:
            return basis
    raise ValidationError("exponents are neither log n nor n - 1; no constructive basis is available")


def bohr_eval(series: GeneralDirichletSeries, basis: BohrBasis, Z, N: int | None = None) -> complex:
    """F_B(Z) = sum_{n <= N} a_n exp(-(R Z)_n)."""
    N = min(len(series), basis.n_max) if N is None else N
    if not 1 <= N <= min(len(series), basis.n_max):
        raise DimensionMismatch(f"N = {N} exceeds the series or basis length")
    Z = np.asarray(Z, dtype=complex).ravel()
    need = basis.touched(N)
    if Z.size < need:
        raise DimensionMismatch(f"rows up to {N} use {need} coordinates, got {Z.size}")
    if Z.size > basis.dimension:
        raise DimensionMismatch(f"basis has {basis.dimension} coordinates, got {Z.size}")
    expo = basis.matrix(N)[:, : Z.size] @ Z
    return csum(series.coefficients[:N] * np.exp(-expo))


def map_zero_to_bohr(s0: complex, basis: BohrBasis) -> np.ndarray:
    """Bohr coordinates Z0 = s0 B of a point s0 (Re z_k = beta_k Re s0)."""
    s0 = complex(s0)
    return np.array([s0 * b for b in basis.betas], dtype=complex)
