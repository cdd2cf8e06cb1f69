"""Strips between consecutive Gamma' curves and the per-window atlas."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

from shapely.geometry import LineString, Polygon
from shapely.ops import unary_union

from ..errors import BoundaryTooClose, NumericFailure, ValidationError, WindowTooSmall
from ..lifting import LiftOptions, LiftedCurve, gamma_prime_seeds, preimage_real_axis
from ..targets import AnalyticTarget
from ..zeros import Rect, Zero, find_zeros
from .domains import FundamentalDomain, fundamental_domains
from .geometry import as_line, clip_polyline, covers, faces, window_polygon
from .merge import MergeTree, merge_tree
from .rules import AlternationReport, MatchingReport, alternating_rule_check, matching_rule_check

EDGE_TOL = 1e-7


@dataclass
class Strip:
    k: int
    polygon: Polygon
    lower: int | None  # index k of the Gamma' curve below, when it crosses the window
    upper: int | None
    touches_top_or_bottom: bool
    pole_strip: bool
    zeros: list[Zero] = field(default_factory=list)
    derivative_zeros: list[Zero] = field(default_factory=list)
    gamma_k0: int | None = None  # index into StripAtlas.gamma
    merge_tree: MergeTree | None = None
    domains: list[FundamentalDomain] = field(default_factory=list)
    alternation: list[AlternationReport] = field(default_factory=list)
    matching_violations: int = 0
    notes: list[str] = field(default_factory=list)

    @property
    def j_k(self) -> int:
        return sum(z.multiplicity for z in self.zeros)

    @property
    def complete(self) -> bool:
        """Bounded by two Gamma' curves, clear of the top and bottom edges and of poles."""
        return self.lower is not None and self.upper is not None and not self.touches_top_or_bottom and not self.pole_strip

    @property
    def derivative_count_ok(self) -> bool:
        return sum(z.multiplicity for z in self.derivative_zeros) == self.j_k - 1

    def summary_row(self) -> dict:
        return {
            "k": self.k,
            "complete": self.complete,
            "j_k": self.j_k,
            "deriv": sum(z.multiplicity for z in self.derivative_zeros),
            "merge_internal": len(self.merge_tree.internal) if self.merge_tree else None,
            "domains": len(self.domains),
            "windings": [d.winding_check for d in self.domains],
            "rule_violations": self.matching_violations + sum(1 for a in self.alternation if not a.holds),
        }

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "complete": self.complete,
            "pole_strip": self.pole_strip,
            "touches_top_or_bottom": self.touches_top_or_bottom,
            "lower": None if self.lower is None else f"Gamma'_{self.lower}",
            "upper": None if self.upper is None else f"Gamma'_{self.upper}",
            "j_k": self.j_k,
            "zeros": [z.to_json() for z in self.zeros],
            "derivative_zeros": [z.to_json() for z in self.derivative_zeros],
            "derivative_count_ok": self.derivative_count_ok,
            "gamma_k0": self.gamma_k0,
            "merge_tree": self.merge_tree.to_json() if self.merge_tree else None,
            "domains": [d.to_json() for d in self.domains],
            "alternation": [a.to_json() for a in self.alternation],
            "notes": self.notes,
            "boundary": [[x, y] for x, y in self.polygon.exterior.coords],
        }


@dataclass
class StripAtlas:
    target: str
    window: Rect
    strips: list[Strip]
    gamma_prime: list[LiftedCurve]
    gamma: list[LiftedCurve]
    zeros: list[Zero]
    derivative_zeros: list[Zero]
    gamma_prime_crossings: list[dict]
    matching: MatchingReport | None = None
    notes: list[str] = field(default_factory=list)

    def strip(self, k: int) -> Strip | None:
        return next((s for s in self.strips if s.k == k), None)

    def summary(self) -> list[dict]:
        return [s.summary_row() for s in self.strips]

    def to_json(self) -> dict:
        return {
            "target": self.target,
            "window": self.window.to_json(),
            "zeros": [z.to_json() for z in self.zeros],
            "derivative_zeros": [z.to_json() for z in self.derivative_zeros],
            "strips": [s.to_json() for s in self.strips],
            "summary": self.summary(),
            "gamma_prime": [c.to_json() for c in self.gamma_prime],
            "gamma": [c.to_json() for c in self.gamma],
            "gamma_prime_crossings": self.gamma_prime_crossings,
            "matching": self.matching.to_json() if self.matching else None,
            "notes": self.notes,
        }


def _strip_index(target: AnalyticTarget, face: Polygon, window: Rect) -> int | None:
    """k from the middle of the face's stretch of the right window edge."""
    edge = LineString([(window.sigma_max, window.t_min), (window.sigma_max, window.t_max)])
    part = face.exterior.intersection(edge.buffer(1e-9))
    if part.is_empty or part.length < 1e-9:
        return None
    _, y0, _, y1 = part.bounds
    t_mid = 0.5 * (y0 + y1)
    return math.floor((t_mid * target.lambda2 - cmath.phase(target.a2)) / (2 * math.pi))


def _touches(poly: Polygon, line: LineString) -> bool:
    return poly.exterior.intersection(line.buffer(EDGE_TOL)).length > 1e-6


def _gamma_prime_crossings(lines: dict[int, list[LineString]], poles) -> list[dict]:
    found = []
    ks = sorted(lines)
    for i, ka in enumerate(ks):
        for kb in ks[i + 1:]:
            for la in lines[ka]:
                for lb in lines[kb]:
                    hit = la.intersection(lb)
                    if hit.is_empty:
                        continue
                    pt = hit.representative_point()
                    near_pole = any(abs(complex(pt.x, pt.y) - p) < 1e-3 for p in poles)
                    found.append({"k": [ka, kb], "at": [pt.x, pt.y], "pole_exception": near_pole})
    return found


def build_atlas(
    target: AnalyticTarget,
    window: Rect,
    opts: LiftOptions | None = None,
    sigma_seed: float = 25.0,
    with_domains: bool = True,
    with_rules: bool = True,
) -> StripAtlas:
    """Strips S_k of ``window`` with their zeros, merge trees, domains and rule checks.

    Every quantity is window-relative: a strip touching the top or bottom
    edge, or carrying a pole, is reported but not flagged complete.
    """
    if target.lambda2 is None or target.a2 is None:
        raise ValidationError(f"{target.label}: no leading exponent to seed the Gamma' curves")
    opts = opts or LiftOptions()
    pad = 2 * math.pi / target.lambda2
    padded = Rect(window.sigma_min, window.sigma_max, window.t_min - pad, window.t_max + pad)
    seeds = gamma_prime_seeds(target, padded, sigma_seed)
    gp = preimage_real_axis(target, padded, gamma_seeds=seeds, opts=opts)
    poles = [p for p, _ in target.poles]

    wpoly = window_polygon(window)
    edge_zone = wpoly.exterior.buffer(1e-9)
    gp_lines: dict[int, list[LineString]] = {}
    for cur in gp:
        for piece in clip_polyline(cur.s, window, overshoot=1e-6):
            ln = as_line(piece)
            if edge_zone.buffer(1e-6).contains(ln):
                continue  # runs along the window edge, e.g. a curve on the real axis
            gp_lines.setdefault(cur.meta["k"], []).append(ln)
    if len(gp_lines) < 2:
        raise WindowTooSmall(f"only {len(gp_lines)} Gamma' curve(s) cross {window}; no strip is enclosed")

    all_lines = [ln for k in sorted(gp_lines) for ln in gp_lines[k]]
    grouped: dict[int, list[Polygon]] = {}
    notes: list[str] = []
    for face in faces(wpoly, all_lines):
        k = _strip_index(target, face, window)
        if k is None:
            notes.append(f"face near {face.representative_point().coords[0]} does not reach the right edge; left unassigned")
            continue
        grouped.setdefault(k, []).append(face)

    top = LineString([(window.sigma_min, window.t_max), (window.sigma_max, window.t_max)])
    bottom = LineString([(window.sigma_min, window.t_min), (window.sigma_max, window.t_min)])
    strips: list[Strip] = []
    for k in sorted(grouped):
        poly = unary_union(grouped[k])
        if poly.geom_type != "Polygon":
            poly = max(poly.geoms, key=lambda p: p.area)
            notes.append(f"S_{k} is disconnected in the window; its largest piece is kept")

        def bounds_by(j):
            return j in gp_lines and any(poly.exterior.buffer(EDGE_TOL).intersection(ln).length > 1e-6 for ln in gp_lines[j])

        strips.append(
            Strip(
                k=k,
                polygon=poly,
                lower=k if bounds_by(k) else None,
                upper=k + 1 if bounds_by(k + 1) else None,
                touches_top_or_bottom=_touches(poly, top) or _touches(poly, bottom),
                pole_strip=any(covers(poly, p, EDGE_TOL) for p in poles),
            )
        )

    # zeros are searched in a slightly larger rectangle so that those on the edges are kept
    search = window.expand(0.5)
    zeros = [z for z in find_zeros(target, search) if window.contains(z.s, margin=1e-9)]
    dzeros = [z for z in find_zeros(target, search, use_derivative=True) if window.contains(z.s, margin=1e-9)]
    for kind, items in (("zero", zeros), ("derivative zero", dzeros)):
        for z in items:
            owner = [s for s in strips if covers(s.polygon, z.s, 1e-9)]
            if len(owner) != 1:
                notes.append(f"{kind} {z.s:.10g} lies in {len(owner)} strips")
                if not owner:
                    continue
            (owner[0].zeros if kind == "zero" else owner[0].derivative_zeros).append(z)

    gamma = preimage_real_axis(target, window, seeds=[z.s for z in zeros], opts=opts)
    for st in strips:
        for idx, cur in enumerate(gamma):
            seed = complex(*cur.meta["seed"])
            if cur.meta["covers"] == "(-inf, 1)" and cur.color == "b" and cur.meta["piece"] == 0 and any(z.s == seed for z in st.zeros):
                st.gamma_k0 = idx
                break

    for st in strips:
        if not st.derivative_count_ok:
            st.notes.append(f"{len(st.derivative_zeros)} derivative zeros for j_k = {st.j_k}")
        # descents may end on zeros lying on the window edge: give them the search margin
        st.merge_tree = merge_tree(target, [z.s for z in st.zeros], [v.s for v in st.derivative_zeros], search, opts)
        if with_domains:
            if st.pole_strip:
                st.notes.append("pole strip: domains not formed")
            else:
                try:
                    st.domains, slits = fundamental_domains(
                        target, st.polygon, [z.s for z in st.zeros], [v.s for v in st.derivative_zeros], window, opts
                    )
                    st.notes.extend(slits.notes)
                except (BoundaryTooClose, NumericFailure) as exc:
                    st.notes.append(f"domains failed: {exc}")

    matching = None
    if with_rules:
        for st in strips:
            st.alternation = [alternating_rule_check(target, z.s, 0.05, z.multiplicity) for z in st.zeros]
        matching = matching_rule_check(target, window, gp + gamma)
        for fnd in matching.violations:
            for st in strips:
                if covers(st.polygon, fnd.s, 1e-9):
                    st.matching_violations += 1

    return StripAtlas(
        target=target.label,
        window=window,
        strips=strips,
        gamma_prime=gp,
        gamma=gamma,
        zeros=zeros,
        derivative_zeros=dzeros,
        gamma_prime_crossings=_gamma_prime_crossings(gp_lines, poles),
        matching=matching,
        notes=notes,
    )
