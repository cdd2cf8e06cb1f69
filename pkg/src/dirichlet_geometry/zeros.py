"""Argument-principle zero counting and location in rectangles."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import (
    BoundaryTooClose,
    MultiplicityAnomaly,
    NonConvergence,
    QuadratureInconclusive,
    ValidationError,
)
from .targets import AnalyticTarget

_GL_X, _GL_W = np.polynomial.legendre.leggauss(12)
_GL_X = 0.5 * (_GL_X + 1.0)
_GL_W = 0.5 * _GL_W

WINDING_TOL = 1e-6
MIN_PANEL = 1e-12
MAX_PANELS = 200_000
ROUND_SLACK = 0.25
MULTIPLICITY_RADIUS = 1e-4
MIN_CELL = 1e-7
NEAR_CONTOUR = 1e-6
EDGE_SHIFT = 1e-5


@dataclass(frozen=True)
class Rect:
    sigma_min: float
    sigma_max: float
    t_min: float
    t_max: float

    def __post_init__(self):
        vals = (self.sigma_min, self.sigma_max, self.t_min, self.t_max)
        if not all(math.isfinite(v) for v in vals):
            raise ValidationError("rectangle bounds must be finite")
        if not (self.sigma_min < self.sigma_max and self.t_min < self.t_max):
            raise ValidationError(f"empty rectangle {vals}")

    @property
    def width(self) -> float:
        return self.sigma_max - self.sigma_min

    @property
    def height(self) -> float:
        return self.t_max - self.t_min

    @property
    def center(self) -> complex:
        return complex(0.5 * (self.sigma_min + self.sigma_max), 0.5 * (self.t_min + self.t_max))

    def corners(self) -> list[complex]:
        return [
            complex(self.sigma_min, self.t_min),
            complex(self.sigma_max, self.t_min),
            complex(self.sigma_max, self.t_max),
            complex(self.sigma_min, self.t_max),
        ]

    def contains(self, s: complex, margin: float = 0.0) -> bool:
        return (
            self.sigma_min - margin <= s.real <= self.sigma_max + margin
            and self.t_min - margin <= s.imag <= self.t_max + margin
        )

    def expand(self, d: float) -> "Rect":
        return Rect(self.sigma_min - d, self.sigma_max + d, self.t_min - d, self.t_max + d)

    def boundary_distance(self, s: complex) -> float:
        """Distance from s to the boundary (positive inside and outside)."""
        dx = max(self.sigma_min - s.real, 0.0, s.real - self.sigma_max)
        dy = max(self.t_min - s.imag, 0.0, s.imag - self.t_max)
        if dx or dy:
            return math.hypot(dx, dy)
        return min(s.real - self.sigma_min, self.sigma_max - s.real, s.imag - self.t_min, self.t_max - s.imag)

    def to_json(self) -> list[float]:
        return [self.sigma_min, self.sigma_max, self.t_min, self.t_max]

    @classmethod
    def parse(cls, text: str) -> "Rect":
        parts = [float(p) for p in text.split(",")]
        if len(parts) != 4:
            raise ValidationError(f"window needs four numbers sigma_min,sigma_max,t_min,t_max, got {text!r}")
        return cls(*parts)


@dataclass(frozen=True)
class Zero:
    s: complex
    kind: str
    multiplicity: int
    residual: float
    of_derivative: bool = False

    def to_json(self) -> dict:
        return {
            "sigma": self.s.real,
            "t": self.s.imag,
            "kind": self.kind,
            "multiplicity": self.multiplicity,
            "residual": self.residual,
            "of_derivative": self.of_derivative,
        }


# ---------------------------------------------------------------- contour integration

Piece = tuple[Callable[[np.ndarray], np.ndarray], Callable[[np.ndarray], np.ndarray], float]


def _segment(a: complex, b: complex) -> Piece:
    d = b - a
    return (lambda u: a + d * u, lambda u: np.full(u.shape, d, dtype=complex), abs(d))


def _circle(c: complex, r: float) -> Piece:
    return (
        lambda u: c + r * np.exp(2j * np.pi * u),
        lambda u: 2j * np.pi * r * np.exp(2j * np.pi * u),
        2 * np.pi * r,
    )


def _polygon(vertices: Sequence[complex]) -> list[Piece]:
    n = len(vertices)
    return [_segment(vertices[i], vertices[(i + 1) % n]) for i in range(n)]


def _logderiv_fn(target: AnalyticTarget, use_derivative: bool):
    order = 2 if use_derivative else 1

    def fn(s):
        jets = target.jet(s, order)
        g, dg = (jets[1], jets[2]) if use_derivative else (jets[0], jets[1])
        with np.errstate(divide="ignore", invalid="ignore"):
            return dg / g

    return fn


def contour_integrals(
    logderiv, pieces: list[Piece], tol: float = WINDING_TOL, near: float | None = None
) -> tuple[complex, complex]:
    """(1/2 pi i) times the integrals of g'/g and s g'/g over a closed contour.

    Adaptive Gauss-Legendre: a panel is accepted once its 12-node value agrees
    with the sum over its two halves within its share of ``tol``.  With
    ``near`` set, a node whose Newton distance |g/g'| is below
    near (1 + |Im s|) raises :class:`BoundaryTooClose` at once; otherwise the
    evaluation noise next to a zero on the contour keeps panels splitting.
    """
    total_len = sum(p[2] for p in pieces)
    panels = []
    for idx, (_, _, length) in enumerate(pieces):
        n = max(1, int(math.ceil(length / 0.5)))
        panels += [(idx, k / n, (k + 1) / n) for k in range(n)]
    acc0 = []
    acc1 = []
    n_seen = 0
    while panels:
        n_seen += len(panels)
        if n_seen > MAX_PANELS:
            raise QuadratureInconclusive("contour quadrature did not settle")
        # evaluate all panels of this generation in one batch
        a = np.array([p[1] for p in panels])
        b = np.array([p[2] for p in panels])
        m = 0.5 * (a + b)
        u_full = a[:, None] + (b - a)[:, None] * _GL_X
        u_left = a[:, None] + (m - a)[:, None] * _GL_X
        u_right = m[:, None] + (b - m)[:, None] * _GL_X
        U = np.stack([u_full, u_left, u_right], axis=1)  # panel, part, node
        S = np.empty(U.shape, dtype=complex)
        D = np.empty(U.shape, dtype=complex)
        for pi_, (idx, _, _) in enumerate(panels):
            z, dz, _ = pieces[idx]
            S[pi_] = z(U[pi_])
            D[pi_] = dz(U[pi_])
        h = np.asarray(logderiv(S.ravel())).reshape(S.shape) * D
        if near is not None:
            with np.errstate(divide="ignore", invalid="ignore"):
                dist = np.abs(D) / np.abs(h)
            close = dist < near * (1 + np.abs(S.imag))
            if np.any(close):
                k = int(np.flatnonzero(close.any(axis=(1, 2)))[0])
                point = complex(S[k][close[k]][0])
                raise BoundaryTooClose(f"a zero sits within {near:.0e} of the contour near {point:.8g}", panels[k][0], point)
        scale = np.stack([(b - a), (m - a), (b - m)], axis=1)[:, :, None]
        I0 = (h * _GL_W * scale).sum(axis=2)
        I1 = (h * S * _GL_W * scale).sum(axis=2)
        nxt = []
        for k, (idx, pa, pb) in enumerate(panels):
            length = pieces[idx][2] * (pb - pa)
            budget = tol * 2 * math.pi * max(length / total_len, 1e-6)
            fine0 = I0[k, 1] + I0[k, 2]
            fine1 = I1[k, 1] + I1[k, 2]
            radius = float(np.max(np.abs(S[k]))) + 1.0
            ok = np.isfinite(fine0) and np.isfinite(fine1)
            if ok and abs(I0[k, 0] - fine0) < budget and abs(I1[k, 0] - fine1) < budget * radius:
                acc0.append(fine0)
                acc1.append(fine1)
                continue
            if pb - pa < MIN_PANEL:
                raise BoundaryTooClose("a zero or pole sits on the contour", idx)
            mid = 0.5 * (pa + pb)
            nxt += [(idx, pa, mid), (idx, mid, pb)]
        panels = nxt
    c = 1 / (2j * math.pi)
    I0 = complex(math.fsum(np.real(acc0)), math.fsum(np.imag(acc0)))
    I1 = complex(math.fsum(np.real(acc1)), math.fsum(np.imag(acc1)))
    return c * I0, c * I1


def _round_winding(w: complex) -> int:
    n = round(w.real)
    if abs(w - n) > ROUND_SLACK:
        raise QuadratureInconclusive(f"winding estimate {w:.4f} is not near an integer")
    return int(n)


def _poles_of(target: AnalyticTarget, use_derivative: bool):
    return [(p, m + 1 if use_derivative else m) for p, m in target.poles]


def nudge_rect(rect: Rect, avoid: Iterable[complex]) -> Rect:
    """Move edges outward so none passes within 1e-6 (1 + |t|) of a point to avoid."""
    lo_s, hi_s, lo_t, hi_t = rect.sigma_min, rect.sigma_max, rect.t_min, rect.t_max
    for p in avoid:
        margin = 1e-6 * (1 + abs(p.imag))
        if lo_t - margin <= p.imag <= hi_t + margin:
            if abs(p.real - lo_s) < margin:
                lo_s = p.real - 2 * margin
            if abs(p.real - hi_s) < margin:
                hi_s = p.real + 2 * margin
        if lo_s - margin <= p.real <= hi_s + margin:
            if abs(p.imag - lo_t) < margin:
                lo_t = p.imag - 2 * margin
            if abs(p.imag - hi_t) < margin:
                hi_t = p.imag + 2 * margin
    return Rect(lo_s, hi_s, lo_t, hi_t)


def _rect_integrals(target, rect, use_derivative):
    return contour_integrals(_logderiv_fn(target, use_derivative), _polygon(rect.corners()), near=NEAR_CONTOUR)


def _count_with_poles(target, rect, use_derivative):
    poles = _poles_of(target, use_derivative)
    w0, w1 = _rect_integrals(target, rect, use_derivative)
    inside = [(p, m) for p, m in poles if rect.contains(p)]
    # zeros - poles, then add the poles back; same for the first moment
    n = _round_winding(w0) + sum(m for _, m in inside)
    moment = w1 + sum(m * p for p, m in inside)
    return n, moment


def shift_edge(rect: Rect, piece: int, d: float) -> Rect:
    """Move one edge (0 bottom, 1 right, 2 top, 3 left) by +d along its normal axis.

    The shift is always towards larger sigma or t, so a shared edge of two
    neighbouring rectangles moves the same way in both and counts stay additive.
    """
    lo_s, hi_s, lo_t, hi_t = rect.sigma_min, rect.sigma_max, rect.t_min, rect.t_max
    if piece == 0:
        lo_t += d
    elif piece == 1:
        hi_s += d
    elif piece == 2:
        hi_t += d
    else:
        lo_s += d
    return Rect(lo_s, hi_s, lo_t, hi_t)


def count_zeros(target: AnalyticTarget, rect: Rect, use_derivative: bool = False) -> int:
    """Number of zeros of f (or f') in ``rect``, counted with multiplicity.

    An edge passing through a zero is shifted by EDGE_SHIFT (1 + |t|) towards
    larger sigma or t and the count repeated.
    """
    rect = nudge_rect(rect, [p for p, _ in target.poles])
    for _ in range(8):
        try:
            return _count_with_poles(target, rect, use_derivative)[0]
        except BoundaryTooClose as exc:
            if exc.piece is None:
                raise
            t = abs(exc.point.imag) if exc.point is not None else max(abs(rect.t_min), abs(rect.t_max))
            rect = shift_edge(rect, exc.piece, EDGE_SHIFT * (1 + t))
    raise BoundaryTooClose(f"zeros keep meeting the contour of {rect}")


# ---------------------------------------------------------------- location


def _newton(target, s0: complex, use_derivative: bool, mult: int = 1, tol: float = 1e-10, max_iter: int = 60):
    order = 2 if use_derivative else 1
    s = complex(s0)
    g = None
    for _ in range(max_iter):
        jets = target.jet(s, order)
        g, dg = (jets[1], jets[2]) if use_derivative else (jets[0], jets[1])
        if g == 0:
            return s, 0.0
        if dg == 0 or not math.isfinite(abs(dg)):
            break
        step = mult * g / dg
        s -= step
        if abs(step) < 1e-15 * (1 + abs(s)):
            break
    jets = target.jet(s, order)
    g = jets[1] if use_derivative else jets[0]
    return s, abs(g)


def _winding_on_circle(target, c: complex, r: float, use_derivative: bool) -> int:
    w0, _ = contour_integrals(_logderiv_fn(target, use_derivative), [_circle(c, r)])
    poles = sum(m for p, m in _poles_of(target, use_derivative) if abs(p - c) < r)
    return _round_winding(w0) + poles


def _classify(target: AnalyticTarget, s: complex, use_derivative: bool) -> str:
    if use_derivative or target.multiplier_zeros is None:
        return "unknown"
    for z in target.multiplier_zeros(s.real - 1.0, s.real + 1.0):
        if abs(z - s) < 1e-6:
            return "trivial"
    return "nontrivial"


def _cut_hits_pole(target, rect, along_t, frac) -> bool:
    for p, _ in target.poles:
        if not rect.contains(p):
            continue
        if along_t:
            gap = abs(p.imag - (rect.t_min + frac * rect.height))
        else:
            gap = abs(p.real - (rect.sigma_min + frac * rect.width))
        if gap < 1e-3 * max(rect.width, rect.height):
            return True
    return False


def _split(rect: Rect, along_t: bool, frac: float) -> tuple[Rect, Rect]:
    if along_t:
        cut = rect.t_min + frac * rect.height
        return Rect(rect.sigma_min, rect.sigma_max, rect.t_min, cut), Rect(rect.sigma_min, rect.sigma_max, cut, rect.t_max)
    cut = rect.sigma_min + frac * rect.width
    return Rect(rect.sigma_min, cut, rect.t_min, rect.t_max), Rect(cut, rect.sigma_max, rect.t_min, rect.t_max)


_SPLIT_FRACTIONS = (0.5, 0.4713, 0.5291, 0.4127, 0.5873, 0.3569)


def find_zeros(
    target: AnalyticTarget,
    rect: Rect,
    tol: float = 1e-10,
    use_derivative: bool = False,
) -> list[Zero]:
    """Locate all zeros of f (or f') in ``rect`` by recursive bisection.

    Cells holding one zero are located by the first moment of g'/g and
    polished by Newton.  Split lines are shifted off-centre when a zero sits
    on them; a zero on the outer contour makes the rectangle grow slightly.
    Results are sorted by (t, sigma).
    """
    poles = [p for p, _ in target.poles]
    scale = 1.0 + max(abs(rect.t_min), abs(rect.t_max))
    # a zero on the outer contour: grow the rectangle a little and retry
    for grow in (0.0, 1e-6 * scale, 1e-4 * scale, 1e-2 * scale):
        try:
            cand = nudge_rect(rect.expand(grow) if grow else rect, poles)
            n, moment = _count_with_poles(target, cand, use_derivative)
            break
        except BoundaryTooClose:
            continue
    else:
        raise BoundaryTooClose(f"zeros on the contour of {rect} persist after expanding it")
    rect = cand
    found: list[Zero] = []
    _descend(target, rect, n, moment, tol, use_derivative, found, depth=0)
    found.sort(key=lambda z: (z.s.imag, z.s.real))
    return found


def _descend(target, rect, n, moment, tol, use_derivative, out, depth):
    if n <= 0:
        return
    if n == 1:
        s_est = moment
        s, res = _newton(target, s_est, use_derivative, tol=tol)
        if rect.contains(s, margin=1e-9 * (1 + abs(s))) and res < max(tol, 1e-9):
            _record(target, s, res, use_derivative, out)
            return
    if max(rect.width, rect.height) < MIN_CELL:
        _cluster(target, rect, n, moment, tol, use_derivative, out)
        return
    if depth > 80:
        raise NonConvergence("subdivision depth exceeded")
    along_t = rect.height >= rect.width
    last_err = None
    for frac in _SPLIT_FRACTIONS:
        if _cut_hits_pole(target, rect, along_t, frac):
            continue
        lo, hi = _split(rect, along_t, frac)
        try:
            n_lo, m_lo = _count_with_poles(target, lo, use_derivative)
            n_hi, m_hi = _count_with_poles(target, hi, use_derivative)
        except (BoundaryTooClose, QuadratureInconclusive) as exc:
            last_err = exc
            continue
        if n_lo + n_hi != n:
            last_err = QuadratureInconclusive(f"split counts {n_lo} + {n_hi} != {n}")
            continue
        _descend(target, lo, n_lo, m_lo, tol, use_derivative, out, depth + 1)
        _descend(target, hi, n_hi, m_hi, tol, use_derivative, out, depth + 1)
        return
    if n >= 2:
        # near a multiple zero the cancellation in g spoils the quadrature on
        # small cells before the size floor is reached
        _cluster(target, rect, n, moment, tol, use_derivative, out)
        return
    raise NonConvergence(f"could not split {rect}: {last_err}")


def _cluster(target, rect, n, moment, tol, use_derivative, out):
    """A cell below the size floor still holding n zeros: treat as one n-fold zero."""
    s, res = _newton(target, moment / n, use_derivative, mult=n, tol=tol)
    if res > max(tol, 1e-9) and not rect.contains(s, margin=MIN_CELL):
        raise NonConvergence(f"Newton failed in a cell of size {rect.width:.1e}")
    _record(target, s, res, use_derivative, out, multiplicity=n)


def _record(target, s, res, use_derivative, out, multiplicity=None):
    if target.real_coefficients and abs(s.imag) < 1e-12 * (1 + abs(s)):
        s = complex(s.real, 0.0)
    for z in out:
        if abs(z.s - s) < 1e-8 * (1 + abs(s)):
            return
    if multiplicity is None:
        try:
            multiplicity = _winding_on_circle(target, s, MULTIPLICITY_RADIUS, use_derivative)
        except (BoundaryTooClose, QuadratureInconclusive):
            multiplicity = 1
    out.append(Zero(complex(s), _classify(target, s, use_derivative), max(1, multiplicity), float(res), use_derivative))


# ---------------------------------------------------------------- checks


@dataclass(frozen=True)
class SimplicityReport:
    s: complex
    winding: int
    derivative_modulus: float
    simple: bool

    @property
    def margin(self) -> float:
        return self.derivative_modulus - 1e-8

    def to_json(self) -> dict:
        return {
            "sigma": self.s.real,
            "t": self.s.imag,
            "winding": self.winding,
            "derivative_modulus": self.derivative_modulus,
            "simple": self.simple,
        }


def simplicity_check(target: AnalyticTarget, zero: Zero, radius: float = MULTIPLICITY_RADIUS) -> SimplicityReport:
    """Winding on a small circle and the size of the next derivative at a zero.

    A non-simple zero emits :class:`MultiplicityAnomaly` as a warning.
    """
    w = _winding_on_circle(target, zero.s, radius, zero.of_derivative)
    jets = target.jet(zero.s, 2 if zero.of_derivative else 1)
    dmod = abs(jets[-1])
    simple = w == 1 and dmod > 1e-8
    if not simple:
        warnings.warn(
            MultiplicityAnomaly(f"zero at {zero.s:.10g} has winding {w}, |next derivative| = {dmod:.3e}"),
            stacklevel=2,
        )
    return SimplicityReport(zero.s, w, dmod, simple)


@dataclass(frozen=True)
class OrderingFinding:
    zero: complex
    derivative_zero: complex
    margin: float

    @property
    def holds(self) -> bool:
        return self.margin > 0

    def to_json(self) -> dict:
        return {
            "zero": [self.zero.real, self.zero.imag],
            "derivative_zero": [self.derivative_zero.real, self.derivative_zero.imag],
            "margin": self.margin,
            "holds": self.holds,
        }


def ordering_check(target: AnalyticTarget, pairs: Iterable[tuple[complex, complex]]) -> list[OrderingFinding]:
    """For each (zero s, paired derivative zero v) report Re v - Re s; it should be positive."""
    return [OrderingFinding(complex(s), complex(v), complex(v).real - complex(s).real) for s, v in pairs]
