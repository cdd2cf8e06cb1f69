"""Paths in the w-plane, each parameterized by tau in [0, 1]."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import ValidationError

# exp(LOG_SCALE) ~ 1e299: an infinite end is reached in log scale
LOG_SCALE = 690.0


@dataclass(frozen=True)
class PlanePath:
    """kind is one of ray, circle, segment, real-interval or subpath.

    ``params`` by kind:
      ray            (angle, r0, r1)        r1 may be inf
      circle         (radius, theta0, turns)
      segment        (w0, w1)
      real-interval  (x0, x1)               x1 may be +-inf
      subpath        (parent, tau_a, tau_b)
    """

    kind: str
    params: tuple

    # -- constructors
    @classmethod
    def ray(cls, angle: float, r0: float = 0.0, r1: float = math.inf) -> "PlanePath":
        if r0 < 0 or r1 < r0:
            raise ValidationError("ray needs 0 <= r0 <= r1")
        return cls("ray", (float(angle), float(r0), float(r1)))

    @classmethod
    def circle(cls, radius: float, theta0: float = 0.0, turns: float = 1.0) -> "PlanePath":
        if radius <= 0:
            raise ValidationError("circle radius must be positive")
        return cls("circle", (float(radius), float(theta0), float(turns)))

    @classmethod
    def segment(cls, w0: complex, w1: complex) -> "PlanePath":
        return cls("segment", (complex(w0), complex(w1)))

    @classmethod
    def real_interval(cls, x0: float, x1: float) -> "PlanePath":
        if not math.isfinite(x0):
            raise ValidationError("real interval must start at a finite point")
        return cls("real-interval", (float(x0), float(x1)))

    def subpath(self, tau_a: float, tau_b: float) -> "PlanePath":
        return PlanePath("subpath", (self, float(tau_a), float(tau_b)))

    def reversed(self) -> "PlanePath":
        return self.subpath(1.0, 0.0)

    # -- evaluation
    def w(self, tau: float) -> complex:
        k, p = self.kind, self.params
        if k == "segment":
            return p[0] + (p[1] - p[0]) * tau
        if k == "real-interval":
            x0, x1 = p
            if math.isinf(x1):
                return complex(x0 + math.copysign(math.expm1(LOG_SCALE * tau), x1))
            return complex(x0 + (x1 - x0) * tau)
        if k == "ray":
            a, r0, r1 = p
            r = r0 + math.expm1(LOG_SCALE * tau) if math.isinf(r1) else r0 + (r1 - r0) * tau
            return r * cmath.exp(1j * a)
        if k == "circle":
            r, th0, turns = p
            return r * cmath.exp(1j * (th0 + 2 * math.pi * turns * tau))
        if k == "subpath":
            parent, a, b = p
            return parent.w(a + (b - a) * tau)
        raise ValidationError(f"unknown path kind {k!r}")

    def dw(self, tau: float) -> complex:
        k, p = self.kind, self.params
        if k == "segment":
            return p[1] - p[0]
        if k == "real-interval":
            x0, x1 = p
            if math.isinf(x1):
                return complex(math.copysign(LOG_SCALE * math.exp(LOG_SCALE * tau), x1))
            return complex(x1 - x0)
        if k == "ray":
            a, r0, r1 = p
            dr = LOG_SCALE * math.exp(LOG_SCALE * tau) if math.isinf(r1) else r1 - r0
            return dr * cmath.exp(1j * a)
        if k == "circle":
            r, th0, turns = p
            return 2j * math.pi * turns * r * cmath.exp(1j * (th0 + 2 * math.pi * turns * tau))
        if k == "subpath":
            parent, a, b = p
            return (b - a) * parent.dw(a + (b - a) * tau)
        raise ValidationError(f"unknown path kind {k!r}")

    @property
    def bounded(self) -> bool:
        k, p = self.kind, self.params
        if k == "real-interval":
            return math.isfinite(p[1])
        if k == "ray":
            return math.isfinite(p[2])
        if k == "subpath":
            return p[0].bounded or max(p[1], p[2]) < 1.0
        return True

    @property
    def is_constant(self) -> bool:
        k, p = self.kind, self.params
        if k == "segment":
            return p[0] == p[1]
        if k == "real-interval":
            return p[0] == p[1]
        if k == "ray":
            return p[1] == p[2]
        if k == "circle":
            return p[2] == 0
        return p[1] == p[2] or p[0].is_constant

    def to_json(self) -> dict:
        k, p = self.kind, self.params
        if k == "subpath":
            return {"kind": k, "parent": p[0].to_json(), "tau": [p[1], p[2]]}
        enc = []
        for v in p:
            if isinstance(v, complex):
                enc.append([v.real, v.imag])
            elif math.isinf(v):
                enc.append("inf" if v > 0 else "-inf")
            else:
                enc.append(v)
        return {"kind": k, "params": enc}


def path_from_json(doc: dict) -> PlanePath:
    kind = doc.get("kind")

    def num(v):
        if isinstance(v, str):
            return float(v)
        if isinstance(v, (list, tuple)):
            return complex(v[0], v[1])
        return v

    if kind == "subpath":
        a, b = doc["tau"]
        return path_from_json(doc["parent"]).subpath(a, b)
    params = [num(v) for v in doc.get("params", [])]
    if kind == "segment":
        return PlanePath.segment(complex(params[0]), complex(params[1]))
    if kind == "real-interval":
        return PlanePath.real_interval(*params)
    if kind == "ray":
        return PlanePath.ray(*params)
    if kind == "circle":
        return PlanePath.circle(*params)
    raise ValidationError(f"unknown path kind {kind!r}")
