"""Polyline and polygon helpers shared by the atlas builders."""

from __future__ import annotations

import math

import numpy as np
from shapely.geometry import LineString, MultiLineString, Point, Polygon
from shapely.geometry.polygon import orient
from shapely.ops import polygonize, unary_union

from ..errors import BoundaryTooClose
from ..targets import AnalyticTarget
from ..zeros import Rect


def window_polygon(window: Rect) -> Polygon:
    return Polygon([(window.sigma_min, window.t_min), (window.sigma_max, window.t_min),
                    (window.sigma_max, window.t_max), (window.sigma_min, window.t_max)])


def clip_polyline(s: np.ndarray, window: Rect, overshoot: float = 0.0) -> list[np.ndarray]:
    """Pieces of a polyline inside ``window``; crossings land exactly on the edges.

    With ``overshoot`` > 0 an end on an edge is pushed that far outside, so
    the piece properly crosses the edge when the pieces are noded.
    """
    s = np.asarray(s, dtype=complex)
    inside = (
        (s.real >= window.sigma_min) & (s.real <= window.sigma_max)
        & (s.imag >= window.t_min) & (s.imag <= window.t_max)
    )
    pieces: list[list[complex]] = []
    cur: list[complex] = []
    for i in range(s.size):
        if inside[i]:
            if not cur and i > 0:
                cur.append(_edge_crossing(s[i - 1], s[i], window))
            cur.append(complex(s[i]))
        elif cur:
            cur.append(_edge_crossing(s[i], s[i - 1], window))
            pieces.append(cur)
            cur = []
    if cur:
        pieces.append(cur)
    out = [_snap(p, window) for p in pieces if len(p) >= 2]
    if overshoot > 0:
        out = [_overshoot(p, window, overshoot) for p in out]
    return [np.array(p) for p in out]


def _edge_crossing(out_pt: complex, in_pt: complex, window: Rect) -> complex:
    """Point where the chord from in_pt to out_pt leaves the window."""
    best = 1.0
    d = out_pt - in_pt
    for bound, comp, sign in (
        (window.sigma_min, "r", -1), (window.sigma_max, "r", 1),
        (window.t_min, "i", -1), (window.t_max, "i", 1),
    ):
        a = in_pt.real if comp == "r" else in_pt.imag
        da = d.real if comp == "r" else d.imag
        if da * sign > 0:
            best = min(best, (bound - a) / da)
    return in_pt + best * d


def _snap(points: list[complex], window: Rect, tol: float = 1e-8) -> list[complex]:
    """Pull end points lying within ``tol`` of an edge exactly onto it."""
    out = list(points)
    for idx in (0, -1):
        p = out[idx]
        re, im = p.real, p.imag
        for b in (window.sigma_min, window.sigma_max):
            if abs(re - b) < tol:
                re = b
        for b in (window.t_min, window.t_max):
            if abs(im - b) < tol:
                im = b
        out[idx] = complex(re, im)
    return out


def _overshoot(points: list[complex], window: Rect, d: float) -> list[complex]:
    out = list(points)
    for idx in (0, -1):
        p = out[idx]
        push = 0j
        if p.real == window.sigma_min:
            push -= d
        elif p.real == window.sigma_max:
            push += d
        if p.imag == window.t_min:
            push -= 1j * d
        elif p.imag == window.t_max:
            push += 1j * d
        if push:
            if idx == 0:
                out.insert(0, p + push)
            else:
                out.append(p + push)
    return out


def as_line(points: np.ndarray) -> LineString:
    return LineString([(p.real, p.imag) for p in points])


def faces(boundary: Polygon, lines: list[LineString]) -> list[Polygon]:
    """Faces of ``boundary`` cut by ``lines`` (dangling pieces are ignored)."""
    pieces = [boundary.exterior] + [ln for ln in lines if not ln.is_empty]
    merged = unary_union(pieces)
    out = [p for p in polygonize(merged) if p.area > 1e-12]
    # polygonize returns the outer holes too when the boundary has them
    return [orient(p, 1.0) for p in out if boundary.buffer(1e-7).contains(p)]


def lines_within(polygon: Polygon, lines: list[LineString]) -> list[LineString]:
    out = []
    for ln in lines:
        part = ln.intersection(polygon.buffer(1e-9))
        if part.is_empty:
            continue
        if isinstance(part, LineString):
            out.append(part)
        elif isinstance(part, MultiLineString):
            out.extend(part.geoms)
        elif hasattr(part, "geoms"):
            out.extend(g for g in part.geoms if isinstance(g, LineString))
    return out


def covers(polygon: Polygon, s: complex, tol: float = 1e-9) -> bool:
    return polygon.distance(Point(s.real, s.imag)) <= tol


def boundary_winding(target: AnalyticTarget, polygon: Polygon, step: float = 0.05, max_depth: int = 30) -> int:
    """Winding number of f along the exterior ring of ``polygon``, taken counter-clockwise.

    Edges are sampled at ``step`` and refined wherever arg f jumps by more
    than 0.5 rad between neighbours.
    """
    coords = np.array(orient(polygon, 1.0).exterior.coords)
    ring = coords[:, 0] + 1j * coords[:, 1]
    total = 0.0
    for a, b in zip(ring[:-1], ring[1:]):
        n = max(2, int(math.ceil(abs(b - a) / step)) + 1)
        u = np.linspace(0.0, 1.0, n)
        pts = a + (b - a) * u
        vals = np.asarray(target.eval(pts))
        total += _arg_sum(target, a, b, u, vals, max_depth)
    w = total / (2 * math.pi)
    return int(round(w))


def _arg_sum(target, a, b, u, vals, depth):
    if np.any(vals == 0) or not np.all(np.isfinite(vals)):
        raise BoundaryTooClose("f vanishes or blows up on a domain boundary")
    dphi = np.angle(vals[1:] / vals[:-1])
    bad = np.abs(dphi) > 0.5
    if not np.any(bad) or depth == 0:
        return float(dphi.sum())
    total = float(dphi[~bad].sum())
    for k in np.flatnonzero(bad):
        uu = np.linspace(u[k], u[k + 1], 9)
        pts = a + (b - a) * uu
        vv = np.asarray(target.eval(pts))
        total += _arg_sum(target, a, b, uu, vv, depth - 1)
    return total
