"""Components of |f| < 1 that leave the window, with their interior curve gamma_{k,0}."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from ..lifting import ESCAPED_WINDOW, CircleComponent, LiftOptions, LiftedCurve, lift_through, preimage_circle
from ..paths import PlanePath
from ..targets import AnalyticTarget
from ..zeros import Rect
from .geometry import covers
from .strips import Strip


@dataclass
class DeltaComponent:
    level: CircleComponent
    window_unbounded: bool
    strip: int | None  # k of the single strip holding the whole level curve
    gamma_k0: LiftedCurve | None
    exit_gap: float | None  # |f - 1| where gamma_{k,0} leaves through the right edge
    exit_bound: float

    @property
    def exit_ok(self) -> bool:
        return self.exit_gap is not None and self.exit_gap < self.exit_bound

    def to_json(self) -> dict:
        return {
            "window_unbounded": self.window_unbounded,
            "strip": self.strip,
            "zeros": [[z.real, z.imag] for z in self.level.zeros],
            "exit_edges": self.level.edges,
            "exit_gap": self.exit_gap,
            "exit_bound": self.exit_bound,
            "exit_ok": self.exit_ok,
            "level_curve": self.level.curve.to_json(),
            "gamma_k0": self.gamma_k0.to_json() if self.gamma_k0 is not None else None,
        }


def delta_components(
    target: AnalyticTarget,
    window: Rect,
    zero_catalog: list[complex],
    strips: list[Strip] | None = None,
    opts: LiftOptions | None = None,
) -> list[DeltaComponent]:
    """Group the unit-level curves with their zeros and test the window-unbounded ones.

    For an unbounded component one contained zero must carry a lift of
    (0, 1) that leaves through the right edge, where |f - 1| is bounded by
    twice the leading term |a2| exp(-lambda2 (sigma_max - 1)).
    """
    opts = replace(opts or LiftOptions(), window=window)
    lam = target.lambda2 or math.log(2)
    a2 = abs(target.a2) if target.a2 else 1.0
    bound = 2 * a2 * math.exp(-lam * (window.sigma_max - 1))
    out = []
    for comp in preimage_circle(target, 1.0, window, zero_catalog, opts):
        unbounded = not comp.bounded
        home = None
        if strips:
            inside = [p for p in comp.curve.s if window.contains(p)]
            holders = [st.k for st in strips if all(covers(st.polygon, p, 1e-6) for p in inside)]
            home = holders[0] if len(holders) == 1 else None
        g0, gap = None, None
        if unbounded:
            for z in comp.zeros:
                for cur in lift_through(target, PlanePath.segment(0.0, 1.0), z, opts):
                    term = cur.termination
                    if term.cause == ESCAPED_WINDOW and term.edge == "right":
                        g0 = cur.with_labels(tag="gamma_k0", color="b", seed=[z.real, z.imag])
                        gap = abs(target.eval(cur.end) - 1)
                        break
                if g0 is not None:
                    break
        out.append(DeltaComponent(comp, unbounded, home, g0, gap, bound))
    return out
