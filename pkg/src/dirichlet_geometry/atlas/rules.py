"""Local colour rules: alternation around zeros and the Gamma/Upsilon matching."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import RadiusTooLarge
from ..lifting import LiftedCurve
from ..targets import AnalyticTarget
from ..zeros import Rect

ALLOWED_PAIRS = {("b", "c"), ("a", "d")}
TANGENT_TOL = 1e-2


@dataclass
class AlternationReport:
    zero: complex
    multiplicity: int
    radius: float
    winding: int
    sequence: list[str]  # colours met walking the circle counter-clockwise

    @property
    def n_a(self) -> int:
        return self.sequence.count("a")

    @property
    def n_b(self) -> int:
        return self.sequence.count("b")

    @property
    def alternations(self) -> int:
        seq = self.sequence
        return sum(1 for i in range(len(seq)) if seq[i] != seq[i - 1]) if len(seq) > 1 else 0

    @property
    def holds(self) -> bool:
        m = self.multiplicity
        return self.n_a == m and self.n_b == m and self.alternations == 2 * m

    def to_json(self) -> dict:
        return {
            "zero": [self.zero.real, self.zero.imag],
            "multiplicity": self.multiplicity,
            "radius": self.radius,
            "winding": self.winding,
            "sequence": "".join(self.sequence),
            "a": self.n_a,
            "b": self.n_b,
            "alternations": self.alternations,
            "holds": self.holds,
        }


def alternating_rule_check(
    target: AnalyticTarget,
    zero: complex,
    radius: float = 0.05,
    multiplicity: int = 1,
    samples: int = 4096,
    min_radius: float = 1e-8,
) -> AlternationReport:
    """Colours of the real-axis pre-image met on a small circle around a zero.

    The circle is shrunk until the image winds ``multiplicity`` times around 0.
    A crossing of Im f = 0 is coloured a when Re f < 0 there and b otherwise.
    """
    z = complex(zero)
    theta = 2 * math.pi * np.arange(samples) / samples
    r = float(radius)
    while True:
        vals = np.asarray(target.eval(z + r * np.exp(1j * theta)))
        dphi = np.angle(np.roll(vals, -1) / vals)
        winding = int(round(dphi.sum() / (2 * math.pi)))
        if winding == multiplicity and np.all(np.abs(dphi) < 0.5):
            break
        r *= 0.5
        if r < min_radius:
            raise RadiusTooLarge(f"no radius above {min_radius:g} isolates the zero at {z:.10g}")
    im = vals.imag
    sg = np.sign(im)
    seq = []
    for i in range(samples):
        j = (i + 1) % samples
        if sg[i] == 0:
            # sample exactly on the axis: a crossing if the neighbours disagree
            if sg[i - 1] * sg[j] < 0:
                seq.append("a" if vals[i].real < 0 else "b")
        elif sg[i] * sg[j] < 0:
            u = im[i] / (im[i] - im[j])
            re = vals[i].real + u * (vals[j].real - vals[i].real)
            seq.append("a" if re < 0 else "b")
    return AlternationReport(z, multiplicity, r, winding, seq)


# ---------------------------------------------------------------- matching rule


@dataclass
class MatchingFinding:
    s: complex
    gamma_color: str
    upsilon_color: str
    tangent_residual: float
    curve_tag: str
    covers: str
    status: str  # allowed | exception | violation | coincident

    def to_json(self) -> dict:
        return {
            "s": [self.s.real, self.s.imag],
            "gamma_color": self.gamma_color,
            "upsilon_color": self.upsilon_color,
            "tangent_residual": self.tangent_residual,
            "curve": self.curve_tag,
            "covers": self.covers,
            "status": self.status,
        }


@dataclass
class MatchingReport:
    findings: list[MatchingFinding] = field(default_factory=list)
    coincident_curves: list[str] = field(default_factory=list)

    @property
    def violations(self) -> list[MatchingFinding]:
        return [f for f in self.findings if f.status == "violation"]

    @property
    def max_tangent_residual(self) -> float:
        return max((f.tangent_residual for f in self.findings), default=0.0)

    def to_json(self) -> dict:
        return {
            "findings": [f.to_json() for f in self.findings],
            "coincident_curves": self.coincident_curves,
            "violations": len(self.violations),
        }


def _solve_intersection(target, s0, iters=30):
    """Newton on (Im f, Im f') = 0 from s0."""
    s = complex(s0)
    for _ in range(iters):
        f, f1, f2 = target.jet(s, 2)
        F = np.array([f.imag, f1.imag])
        J = np.array([[f1.imag, f1.real], [f2.imag, f2.real]])
        try:
            d = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            return None
        s += complex(d[0], d[1])
        if math.hypot(d[0], d[1]) < 1e-14 * (1 + abs(s)):
            break
    f, f1 = target.jet(s, 1)
    if abs(f.imag) > 1e-9 * max(1.0, abs(f)) or abs(f1.imag) > 1e-9 * max(1.0, abs(f1)):
        return None
    return s


def _on_real_preimage(target, s, x):
    """Newton onto f(s) = x (x real) from s."""
    for _ in range(20):
        f, f1 = target.jet(s, 1)
        step = (f - x) / f1
        s -= step
        if abs(step) < 1e-15 * (1 + abs(s)):
            break
    return s


def tangent_residual(target: AnalyticTarget, s: complex) -> float:
    """Angle between the chord of the real-axis pre-image through s and the horizontal."""
    f, f1 = target.jet(s, 1)
    x = f.real
    dx = 1e-4 * abs(f1)
    a = _on_real_preimage(target, s - dx / f1, x - dx)
    b = _on_real_preimage(target, s + dx / f1, x + dx)
    ang = abs(cmath.phase(b - a)) % math.pi
    return min(ang, math.pi - ang)


def _classify_pair(gc: str, uc: str, covers: str, sigma: float) -> str:
    if (gc, uc) in ALLOWED_PAIRS:
        return "allowed"
    if (gc, uc) == ("b", "d") and covers == "(-inf, 1)" and sigma > 0.5:
        return "exception"
    return "violation"


def matching_rule_check(
    target: AnalyticTarget,
    window: Rect,
    curves: list[LiftedCurve],
) -> MatchingReport:
    """Check every crossing of the Gamma curves (f real) with Upsilon (f' real).

    On each curve the sign changes of Im f' are refined to points with
    f and f' both real.  There the curve's tangent must be horizontal, and
    the colour pair (sign of f, sign of f') must be b-c or a-d; b-d is
    accepted on a curve covering (-inf, 1) right of sigma = 1/2.  Curves
    along which Im f' vanishes identically coincide with an Upsilon curve;
    they are listed separately and carry no findings.
    """
    report = MatchingReport()
    seen: list[complex] = []
    for cur in curves:
        pts = cur.s[[window.contains(p, margin=1e-9) for p in cur.s]]
        if pts.size < 2:
            continue
        f1 = np.asarray(target.jet(pts, 1)[1])
        scale = np.maximum(1.0, np.abs(f1))
        small = np.abs(f1.imag) < 1e-10 * scale
        tag = cur.tag or "Gamma"
        covers = cur.meta.get("covers", "R")
        if np.all(small):
            report.coincident_curves.append(f"{tag} from {complex(pts[0]):.6g}")
            continue
        sgn = np.where(small, 0, np.sign(f1.imag))
        for i in range(pts.size - 1):
            if sgn[i] == 0 or sgn[i + 1] == 0 or sgn[i] == sgn[i + 1]:
                continue
            u = f1.imag[i] / (f1.imag[i] - f1.imag[i + 1])
            p = _solve_intersection(target, pts[i] + u * (pts[i + 1] - pts[i]))
            if p is None or not window.contains(p):
                continue
            if any(abs(p - q) < 1e-8 * (1 + abs(p)) for q in seen):
                continue
            seen.append(p)
            f, fp = target.jet(p, 1)
            gc = "a" if f.real < 0 else "b"
            uc = "c" if fp.real < 0 else "d"
            report.findings.append(
                MatchingFinding(p, gc, uc, tangent_residual(target, p), tag, covers, _classify_pair(gc, uc, covers, p.real))
            )
    report.findings.sort(key=lambda f: (f.s.imag, f.s.real))
    return report
