"""Fundamental domains: a strip cut along the lifted slits [f(v), 1] and (1, +inf)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from shapely.geometry import Polygon

from ..errors import BoundaryTooClose, HigherOrderBranch, NotABranchPoint, NumericFailure
from ..lifting import COMPLETED, ESCAPED_WINDOW, LiftOptions, LiftedCurve, branch_fan, lift_through
from ..paths import PlanePath
from ..targets import AnalyticTarget
from ..zeros import Rect
from .geometry import as_line, boundary_winding, clip_polyline, covers, faces


@dataclass
class FundamentalDomain:
    polygon: Polygon
    zeros: list[complex]
    winding_check: int | None
    truncated: bool = False
    notes: list[str] = field(default_factory=list)

    @property
    def contained_zero(self) -> complex | None:
        return self.zeros[0] if len(self.zeros) == 1 else None

    def to_json(self) -> dict:
        ring = list(self.polygon.exterior.coords)
        return {
            "zeros": [[z.real, z.imag] for z in self.zeros],
            "winding_check": self.winding_check,
            "truncated": self.truncated,
            "notes": self.notes,
            "boundary": [[x, y] for x, y in ring],
        }


@dataclass
class SlitSystem:
    curves: list[LiftedCurve]
    truncated: bool
    notes: list[str]


def slit_curves(
    target: AnalyticTarget,
    derivative_zeros: list[complex],
    window: Rect,
    opts: LiftOptions | None = None,
) -> SlitSystem:
    """Lifts of the segments [f(v), 1], continued along (1, +inf) where they end at f = 1."""
    opts = replace(opts or LiftOptions(), window=window)
    curves: list[LiftedCurve] = []
    notes: list[str] = []
    truncated = False
    for v in derivative_zeros:
        v = complex(v)
        fv = target.eval(v)
        try:
            arcs = branch_fan(target, v, PlanePath.segment(fv, 1.0), opts)
        except (NotABranchPoint, HigherOrderBranch, NumericFailure) as exc:
            notes.append(f"slit at v = {v:.10g} not lifted: {exc}")
            truncated = True
            continue
        for arc in arcs:
            pieces = [arc.with_labels(tag="eta", v=[v.real, v.imag])]
            term = arc.termination
            if term.cause == COMPLETED:
                # reached a point u with f(u) = 1: the boundary continues along (1, +inf)
                for ext in lift_through(target, PlanePath.real_interval(1.0, math.inf), arc.end, opts):
                    pieces.append(ext.with_labels(tag="eta-continuation", v=[v.real, v.imag]))
                    if ext.termination.cause == ESCAPED_WINDOW and ext.termination.edge not in ("left", "right"):
                        truncated = True
            elif term.cause == ESCAPED_WINDOW:
                if term.edge != "right":
                    truncated = True
                    notes.append(f"slit from v = {v:.10g} leaves through the {term.edge} edge")
            else:
                truncated = True
                notes.append(f"slit from v = {v:.10g} stopped: {term.cause}")
            curves.extend(pieces)
    return SlitSystem(curves, truncated, notes)


def fundamental_domains(
    target: AnalyticTarget,
    strip_polygon: Polygon,
    zeros: list[complex],
    derivative_zeros: list[complex],
    window: Rect,
    opts: LiftOptions | None = None,
) -> tuple[list[FundamentalDomain], SlitSystem]:
    """Cut the strip along the slits and check each face two ways.

    Each face is checked by the zeros it contains (point in polygon) and by
    the winding number of f along its boundary (argument principle, poles
    added back).
    """
    slits = slit_curves(target, derivative_zeros, window, opts)
    lines = []
    for cur in slits.curves:
        for piece in clip_polyline(cur.s, window, overshoot=1e-6):
            lines.append(as_line(piece))
    domains = []
    for face in sorted(faces(strip_polygon, lines), key=lambda p: (p.representative_point().y, p.representative_point().x)):
        inside = [z for z in zeros if covers(face, z, 1e-9)]
        notes = []
        try:
            w = boundary_winding(target, face)
            w += sum(m for p, m in target.poles if covers(face, p, 0.0))
        except (BoundaryTooClose, NumericFailure) as exc:
            w = None
            notes.append(f"winding not computed: {exc}")
        domains.append(FundamentalDomain(face, inside, w, slits.truncated, notes))
    return domains, slits
