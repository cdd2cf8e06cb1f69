"""Probe of a horizontal segment joining sigma + it and 1 - sigma + it.

Along s(lam) = (1 - lam) s1 + lam s2 the image z = f(s) and Z = f'(s) obey
z'(lam) = (s2 - s1) Z(lam) = (1 - 2 sigma) Z(lam).  The probe samples both
curves, checks that identity with finite differences and records where each
image crosses the real axis.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from ..errors import PoleOnSegment, ValidationError
from ..targets import AnalyticTarget

GAMMA = "gamma-crosses-R"
GAMMA_PRIME = "gamma'-crosses-R"
ZERO_TOL = 1e-8


@dataclass
class CrossingEvent:
    lam: float
    which: str
    sign: int  # +1 when Im goes from negative to positive
    value: float  # real value of the image at the crossing

    def to_json(self) -> dict:
        return {"lambda": self.lam, "which": self.which, "sign": self.sign, "value": self.value}


@dataclass
class ProbeReport:
    s1: complex
    s2: complex
    lam: np.ndarray
    z: np.ndarray
    Z: np.ndarray
    identity_residual: float
    max_abs_Z: float
    crossing_events: list[CrossingEvent] = field(default_factory=list)
    verdict: str = "consistent"
    swapped: bool = False
    on_axis: list[str] = field(default_factory=list)  # images lying on the real axis throughout

    @property
    def relative_residual(self) -> float:
        return self.identity_residual / self.max_abs_Z if self.max_abs_Z else 0.0

    def to_json(self, samples: bool = True) -> dict:
        out = {
            "s1": [self.s1.real, self.s1.imag],
            "s2": [self.s2.real, self.s2.imag],
            "swapped": self.swapped,
            "identity_residual": self.identity_residual,
            "relative_residual": self.relative_residual,
            "crossing_events": [e.to_json() for e in self.crossing_events],
            "verdict": self.verdict,
            "on_axis": self.on_axis,
        }
        if samples:
            out["lambda"] = self.lam.tolist()
            out["z"] = [[v.real, v.imag] for v in self.z]
            out["Z"] = [[v.real, v.imag] for v in self.Z]
        return out


def _derivative_fd(target, s1, s2, lam, h=1e-3):
    """Richardson-extrapolated central difference of lam -> f(s(lam))."""
    d = s2 - s1

    def central(step):
        return (np.asarray(target.eval(s1 + (lam + step) * d)) - np.asarray(target.eval(s1 + (lam - step) * d))) / (2 * step)

    return (4 * central(h / 2) - central(h)) / 3


def _crossings(target, s1, s2, lam, values, which, deriv):
    im = values.imag
    out = []

    def im_at(x):
        s = s1 + x * (s2 - s1)
        return (target.deriv(s) if deriv else target.eval(s)).imag

    for i in range(lam.size - 1):
        a, b = im[i], im[i + 1]
        if a == 0 or a * b > 0:
            continue
        if b == 0:
            x = lam[i + 1]
        else:
            x = brentq(im_at, lam[i], lam[i + 1], xtol=1e-15)
        s = s1 + x * (s2 - s1)
        val = (target.deriv(s) if deriv else target.eval(s)).real
        out.append(CrossingEvent(float(x), which, 1 if b > a else -1, float(val)))
    return out


def probe_symmetric_pair(target: AnalyticTarget, sigma: float, t: float, n_samples: int = 1000) -> ProbeReport:
    """Sample f and f' on the segment from sigma + it to 1 - sigma + it."""
    if not 0 < sigma < 1:
        raise ValidationError("sigma must lie in (0, 1)")
    if n_samples < 2:
        raise ValidationError("need at least two samples")
    swapped = sigma > 0.5
    if swapped:
        sigma = 1.0 - sigma
    s1, s2 = complex(sigma, t), complex(1.0 - sigma, t)
    lam = np.linspace(0.0, 1.0, n_samples + 1)
    if s1 == s2:
        z, Z = target.jet(s1, 1)
        return ProbeReport(s1, s2, np.array([0.0]), np.array([z]), np.array([Z]), 0.0, abs(Z), [], "degenerate", swapped)
    for p, _ in target.poles:
        if abs(p.imag - t) < 1e-9 and s1.real - 1e-9 <= p.real <= s2.real + 1e-9:
            raise PoleOnSegment(f"pole at {p} lies on the segment")
    s = s1 + lam * (s2 - s1)
    z, Z = (np.asarray(v) for v in target.jet(s, 1))
    zp = _derivative_fd(target, s1, s2, lam)
    resid = float(np.max(np.abs(zp - (s2 - s1) * Z)))
    events = _crossings(target, s1, s2, lam, z, GAMMA, False) + _crossings(target, s1, s2, lam, Z, GAMMA_PRIME, True)
    events.sort(key=lambda e: (e.lam, e.which))
    # an image inside the real axis has no crossings to report, only the fact itself
    on_axis = [
        name for name, v in ((GAMMA, z), (GAMMA_PRIME, Z)) if np.all(np.abs(v.imag) <= 1e-12 * np.maximum(1.0, np.abs(v)))
    ]
    both_zero = abs(z[0]) < ZERO_TOL and abs(z[-1]) < ZERO_TOL
    verdict = "inconsistent-configuration" if both_zero else "consistent"
    return ProbeReport(s1, s2, lam, z, Z, resid, float(np.max(np.abs(Z))), events, verdict, swapped, on_axis)
