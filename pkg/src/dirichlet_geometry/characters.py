"""Dirichlet characters built from the structure of (Z/qZ)^*."""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True, eq=False)
class DirichletCharacter:
    modulus: int
    values: np.ndarray  # values[a] = chi(a mod q)
    index: int = 0

    def __call__(self, n: int) -> complex:
        return complex(self.values[n % self.modulus])

    @property
    def is_principal(self) -> bool:
        coprime = [a for a in range(self.modulus) if math.gcd(a, self.modulus) == 1]
        return all(abs(self.values[a] - 1) < 1e-12 for a in coprime)

    @property
    def is_real(self) -> bool:
        return bool(np.all(np.abs(self.values.imag) < 1e-12))


def _factorize(n: int) -> list[tuple[int, int]]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += 1
    if n > 1:
        out.append((n, 1))
    return out


def _primitive_root(pk: int, p: int) -> int:
    order = pk // p * (p - 1)
    prime_factors = [f for f, _ in _factorize(order)]
    for g in range(2, pk):
        if math.gcd(g, pk) != 1:
            continue
        if all(pow(g, order // f, pk) != 1 for f in prime_factors):
            return g
    raise ValidationError(f"no primitive root mod {pk}")


def _discrete_log(x: int, g: int, m: int, order: int) -> int:
    acc = 1
    for k in range(order):
        if acc == x % m:
            return k
        acc = acc * g % m
    raise ValidationError(f"{x} not in <{g}> mod {m}")


def _cyclic_factors(q: int):
    """Yield (modulus_part, generator, order, log_fn) for each cyclic factor."""
    for p, e in _factorize(q):
        pk = p**e
        if p != 2:
            g = _primitive_root(pk, p)
            order = pk // p * (p - 1)
            yield pk, order, (lambda a, g=g, pk=pk, order=order: _discrete_log(a, g, pk, order))
        elif e == 2:
            yield 4, 2, (lambda a: 0 if a % 4 == 1 else 1)
        elif e >= 3:
            # (Z/2^e)^* = <-1> x <5>
            yield pk, 2, (lambda a, pk=pk: 0 if a % 4 == 1 else 1)
            order5 = pk // 4

            def log5(a, pk=pk, order5=order5):
                a = a if a % 4 == 1 else (-a) % pk
                return _discrete_log(a, 5, pk, order5)

            yield pk, order5, log5


def dirichlet_characters(q: int) -> list[DirichletCharacter]:
    """All phi(q) characters mod ``q``; index 0 is the principal character."""
    if q < 1:
        raise ValidationError("modulus must be a positive integer")
    factors = list(_cyclic_factors(q))
    orders = [f[1] for f in factors]
    chars = []
    for idx, exps in enumerate(itertools.product(*[range(o) for o in orders])):
        values = np.zeros(q, dtype=complex)
        for a in range(q):
            if math.gcd(a, q) != 1:
                continue
            phase = 0.0
            for (mod, order, log), e in zip(factors, exps):
                phase += e * log(a % mod) / order
            values[a] = cmath.exp(2j * math.pi * phase)
            # snap to exact roots of unity where they are rational
            for exact in (1, -1, 1j, -1j):
                if abs(values[a] - exact) < 1e-13:
                    values[a] = exact
        if q == 1:
            values[0] = 1.0
        chars.append(DirichletCharacter(q, values, idx))
    return chars


def dirichlet_character(q: int, index: int) -> DirichletCharacter:
    chars = dirichlet_characters(q)
    if not 0 <= index < len(chars):
        raise ValidationError(f"character_index {index} out of range for modulus {q} ({len(chars)} characters)")
    return chars[index]
