"""Lifting of w-plane paths to pre-image curves under a target.

A lift follows s(tau) with f(s(tau)) = w(tau).  Each step predicts with the
local inverse (ds = dw / f') and corrects by Newton onto the fiber, so every
stored sample satisfies the residual contract.  Step control acts on the
step length in the s-plane.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (
    AccuracyWindowExceeded,
    HigherOrderBranch,
    NotABranchPoint,
    OverflowGuard,
    PoleAt1,
    SeedMismatch,
    ValidationError,
)
from .paths import PlanePath
from .targets import AnalyticTarget
from .zeros import Rect

COMPLETED = "completed"
BRANCH_POINT = "branch-point"
POLE_APPROACHED = "pole-approached"
ESCAPED_WINDOW = "escaped-window"
STEP_UNDERFLOW = "step-underflow"

_EVAL_FAILURES = (AccuracyWindowExceeded, OverflowGuard, PoleAt1, FloatingPointError, ZeroDivisionError)


@dataclass(frozen=True)
class LiftOptions:
    corrector_tol: float = 1e-9
    seed_tol: float = 1e-8
    branch_tol: float = 1e-6
    h_init: float = 0.02
    h_max: float = 0.1
    h_min: float = 1e-12
    pole_radius: float = 1e-4
    escape_bound: float = 1e12
    max_steps: int = 50_000
    window: Rect | None = None


@dataclass(frozen=True)
class Termination:
    cause: str
    point: complex | None = None
    value: float | None = None
    edge: str | None = None

    def to_json(self) -> dict:
        out = {"cause": self.cause}
        if self.point is not None:
            out["point"] = [self.point.real, self.point.imag]
        if self.value is not None:
            out["value"] = self.value
        if self.edge is not None:
            out["edge"] = self.edge
        return out


@dataclass
class LiftedCurve:
    tau: np.ndarray
    s: np.ndarray
    residual: np.ndarray
    termination: Termination
    path: PlanePath
    tag: str | None = None
    color: str = "none"
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return self.s.size

    @property
    def start(self) -> complex:
        return complex(self.s[0])

    @property
    def end(self) -> complex:
        return complex(self.s[-1])

    @property
    def max_residual(self) -> float:
        return float(self.residual.max()) if self.residual.size else 0.0

    def with_labels(self, tag: str | None = None, color: str | None = None, **meta) -> "LiftedCurve":
        return replace(
            self,
            tag=self.tag if tag is None else tag,
            color=self.color if color is None else color,
            meta={**self.meta, **meta},
        )

    def to_json(self) -> dict:
        return {
            "tag": self.tag,
            "color": self.color,
            "termination": self.termination.to_json(),
            "path": self.path.to_json(),
            "meta": self.meta,
            "samples": [
                [float(t), float(s.real), float(s.imag), float(r)]
                for t, s, r in zip(self.tau, self.s, self.residual)
            ],
        }


def _rel(f: complex, w: complex) -> float:
    return abs(f - w) / max(1.0, abs(w))


def _jet1(target: AnalyticTarget, s: complex):
    f, f1 = target.jet(s, 1)
    return f, f1


def _edge_of(window: Rect, s: complex) -> str:
    d = {
        "left": abs(s.real - window.sigma_min),
        "right": abs(s.real - window.sigma_max),
        "bottom": abs(s.imag - window.t_min),
        "top": abs(s.imag - window.t_max),
    }
    return min(d, key=d.get)


class _Tracker:
    def __init__(self, target: AnalyticTarget, path: PlanePath, opts: LiftOptions):
        self.target = target
        self.path = path
        self.opts = opts
        self.poles = [p for p, _ in target.poles]

    def correct(self, s: complex, w: complex, max_iter: int = 6):
        """Newton onto f(s) = w; returns (s, f, f', residual, iterations)."""
        tol = 1e-2 * self.opts.corrector_tol
        f, f1 = _jet1(self.target, s)
        r = _rel(f, w)
        it = 0
        while r > tol and it < max_iter:
            if f1 == 0:
                break
            s = s - (f - w) / f1
            f, f1 = _jet1(self.target, s)
            r = _rel(f, w)
            it += 1
        return s, f, f1, r, it

    def attempt(self, s, f, f1, tau, dtau, h):
        """One predictor-corrector step; returns (s, f, f1, r, it) or None."""
        w_new = self.path.w(tau + dtau)
        s_pred = s + (w_new - f) / f1
        try:
            s_new, fn, f1n, r, it = self.correct(s_pred, w_new)
        except _EVAL_FAILURES:
            return "eval-failure"
        if not (math.isfinite(r) and r < self.opts.corrector_tol and it <= 4):
            return None
        if abs(s_new - s_pred) > 0.3 * h or abs(s_new - s) > 2.0 * h:
            return None
        return s_new, fn, f1n, r, it

    def near_pole(self, s: complex) -> bool:
        return any(abs(s - p) < self.opts.pole_radius for p in self.poles)


def _refine_critical(target: AnalyticTarget, s: complex, iters: int = 40, reach: float | None = None) -> complex:
    # Newton on f'; with ``reach`` set, a seed that wanders off is returned as is
    s0 = s
    for _ in range(iters):
        _, f1, f2 = target.jet(s, 2)
        if f2 == 0:
            break
        step = f1 / f2
        s -= step
        if reach is not None and abs(s - s0) > reach * (1 + abs(s0)):
            return s0
        if abs(step) < 1e-15 * (1 + abs(s)):
            break
    return s


def _heading_to(path: PlanePath, tau: float, w_crit: complex) -> bool:
    """True unless the path is moving away from the critical value (as when leaving a branch point)."""
    gap = path.w(tau) - w_crit
    return (gap.conjugate() * path.dw(tau)).real <= 0


def lift(
    target: AnalyticTarget,
    path: PlanePath,
    s_start: complex,
    opts: LiftOptions | None = None,
) -> LiftedCurve:
    """Continue s with f(s) = w(tau) from tau = 0 towards tau = 1."""
    opts = opts or LiftOptions()
    s = complex(s_start)
    w0 = path.w(0.0)
    f, f1 = _jet1(target, s)
    r0 = _rel(f, w0)
    if not r0 < opts.seed_tol:
        raise SeedMismatch(f"|f(s_start) - w(0)| = {abs(f - w0):.3e} exceeds the seed tolerance")
    taus, ss, rs = [0.0], [s], [r0]

    def finish(cause, point=None, value=None, edge=None):
        return LiftedCurve(np.array(taus), np.array(ss), np.array(rs), Termination(cause, point, value, edge), path)

    if path.is_constant:
        return finish(COMPLETED)
    win = opts.window
    if win is not None and not win.contains(s, margin=1e-9 * (1 + abs(s))):
        return finish(ESCAPED_WINDOW, edge=_edge_of(win, s))
    tr = _Tracker(target, path, opts)
    tau = 0.0
    h = opts.h_init
    easy = 0
    for _ in range(opts.max_steps):
        if tau >= 1.0:
            return finish(COMPLETED)
        if abs(f1) < opts.branch_tol:
            # small |f'| alone is not enough (f' -> 0 as sigma -> +inf): need a critical point close by
            v = _refine_critical(target, s)
            fv, f1v = _jet1(target, v)
            if abs(v - s) < max(4 * h, 1e-6) and abs(f1v) < opts.branch_tol and _heading_to(path, tau, fv):
                return finish(BRANCH_POINT, v, abs(f1v))
        if abs(f) > opts.escape_bound and path.bounded:
            return finish(POLE_APPROACHED, s, abs(f))
        speed = abs(path.dw(tau))
        dtau = 1.0 - tau if speed == 0 else min(1.0 - tau, h * abs(f1) / speed)
        if dtau <= 0 or tau + dtau == tau:
            return finish(STEP_UNDERFLOW, s)
        res = tr.attempt(s, f, f1, tau, dtau, h)
        if res == "eval-failure":
            # the evaluator refused: the tracked curve leaves its validated window
            return _land_on_boundary(tr, taus, ss, rs, s, f, f1, tau, dtau, h, finish, eval_edge=True)
        if res is None:
            h *= 0.5
            easy = 0
            # a critical point within reach explains repeated rejections
            if h < 1e-4:
                v = _refine_critical(target, s)
                fv, f1v = _jet1(target, v)
                if abs(f1v) < opts.branch_tol and abs(v - s) < 4 * h + 1e-9 and _heading_to(path, tau, fv):
                    return finish(BRANCH_POINT, v, abs(f1v))
            if h < opts.h_min:
                return finish(STEP_UNDERFLOW, s)
            continue
        s_new, fn, f1n, r, it = res
        if win is not None and not win.contains(s_new):
            return _land_on_boundary(tr, taus, ss, rs, s, f, f1, tau, dtau, h, finish)
        tau = 1.0 if dtau >= 1.0 - tau else tau + dtau
        s, f, f1 = s_new, fn, f1n
        taus.append(tau)
        ss.append(s)
        rs.append(r)
        if tr.near_pole(s):
            return finish(POLE_APPROACHED, s, abs(f))
        if it <= 2:
            easy += 1
            if easy >= 3:
                h = min(2.0 * h, opts.h_max)
                easy = 0
        else:
            easy = 0
    return finish(STEP_UNDERFLOW, s)


def _land_on_boundary(tr, taus, ss, rs, s, f, f1, tau, dtau, h, finish, eval_edge=False):
    """Bisect the step fraction so the final sample sits on the window boundary."""
    win = tr.opts.window
    lo, hi = 0.0, 1.0
    best = None
    for _ in range(40):
        mid = 0.5 * (lo + hi)
        res = tr.attempt(s, f, f1, tau, mid * dtau, h)
        inside = isinstance(res, tuple) and (win is None or win.contains(res[0]))
        if inside:
            lo, best = mid, res
        else:
            hi = mid
        if (hi - lo) * dtau < 1e-15 * max(1.0, tau):
            break
    if best is not None and lo > 0:
        taus.append(tau + lo * dtau)
        ss.append(best[0])
        rs.append(best[3])
    end = ss[-1]
    edge = _edge_of(win, end) if win is not None else None
    if eval_edge and (win is None or win.boundary_distance(end) > 1e-6):
        edge = "accuracy-window"
    return finish(ESCAPED_WINDOW, end, None, edge)


def lift_back(target: AnalyticTarget, curve: LiftedCurve, opts: LiftOptions | None = None) -> LiftedCurve:
    """Lift the traversed part of ``curve``'s path backwards from its endpoint."""
    tau_end = float(curve.tau[-1])
    back = curve.path.subpath(tau_end, 0.0)
    out = lift(target, back, curve.end, opts)
    tol = (opts or LiftOptions()).corrector_tol
    term = out.termination
    if term.cause == BRANCH_POINT:
        # a curve that left a branch point returns to it: the path ends on the critical value
        r = _rel(target.eval(term.point), back.w(1.0))
        if r < tol:
            return replace(
                out,
                tau=np.append(out.tau, 1.0),
                s=np.append(out.s, term.point),
                residual=np.append(out.residual, r),
                termination=Termination(COMPLETED),
            )
        return out
    if term.cause != COMPLETED:
        return out
    # f(s) = w is square-root conditioned at a critical value; f'(s) = 0 is not
    f_end, f1_end = _jet1(target, out.end)
    if abs(f1_end) < 1e-2 * max(1.0, abs(f_end)):
        v = _refine_critical(target, out.end, reach=1e-3)
        r = _rel(target.eval(v), back.w(1.0))
        if v != out.end and r < tol:
            # the critical point replaces the last sample: same tau, better conditioned
            return replace(out, s=np.append(out.s[:-1], v), residual=np.append(out.residual[:-1], r))
    return _polish_end(target, out, back.w(1.0))


def _polish_end(target: AnalyticTarget, cur: LiftedCurve, w: complex, iters: int = 8) -> LiftedCurve:
    """Newton on the last sample past the corrector tolerance, while the residual keeps falling.

    Where |f'| is small (far right, f close to 1) the corrector tolerance in w
    leaves a large error in s; the endpoint deserves machine precision.
    """
    s, r = cur.end, float(cur.residual[-1])
    for _ in range(iters):
        f, f1 = _jet1(target, s)
        if f1 == 0:
            break
        s_new = s - (f - w) / f1
        r_new = _rel(target.eval(s_new), w)
        if not r_new < r and s_new != s:
            break
        s, r = s_new, r_new
        if r == 0:
            break
    return replace(cur, s=np.append(cur.s[:-1], s), residual=np.append(cur.residual[:-1], r))


# ---------------------------------------------------------------- branch points


def _locate_on_path(path: PlanePath, w: complex) -> float:
    """tau minimizing |path(tau) - w| (coarse grid, then golden section)."""
    grid = np.linspace(0.0, 1.0, 2049)
    d = np.array([abs(path.w(t) - w) for t in grid])
    k = int(np.argmin(d))
    a, b = grid[max(k - 1, 0)], grid[min(k + 1, grid.size - 1)]
    g = (math.sqrt(5) - 1) / 2
    for _ in range(80):
        c1 = b - g * (b - a)
        c2 = a + g * (b - a)
        if abs(path.w(c1) - w) < abs(path.w(c2) - w):
            b = c2
        else:
            a = c1
    return 0.5 * (a + b)


def branch_fan(
    target: AnalyticTarget,
    v: complex,
    path: PlanePath,
    opts: LiftOptions | None = None,
) -> list[LiftedCurve]:
    """The two lifted components of ``path`` through a simple branch point v.

    Near v, f(s) ~ f(v) + c (s - v)^2, so a path through f(v) lifts to four
    rays at right angles.  Each forward ray is paired with the backward ray
    obtained by turning it a quarter turn counter-clockwise; when the path
    starts or ends at f(v) only the two rays on the existing side are returned.
    """
    opts = opts or LiftOptions()
    v = _refine_critical(target, complex(v), reach=1e-3)
    fv, f1v, f2v = target.jet(v, 2)
    if abs(f1v) >= opts.branch_tol:
        raise NotABranchPoint(f"|f'(v)| = {abs(f1v):.3e} is not below the branch threshold")
    if abs(f2v) < 1e-8:
        raise HigherOrderBranch(f"|f''(v)| = {abs(f2v):.3e}: branch of order > 2")
    c = 0.5 * f2v
    tau_v = _locate_on_path(path, fv)
    if abs(path.w(tau_v) - fv) > 1e-8 * max(1.0, abs(fv)):
        raise NotABranchPoint("path does not pass through f(v)")
    if tau_v < 1e-12:
        tau_v = 0.0
    if tau_v > 1 - 1e-12:
        tau_v = 1.0
    # radius where |f'| ~ 1e-4 keeps the first sample well clear of the branch threshold
    rho = min(1e-3, max(1e-6, 5e-5 / abs(c)))

    def rays(sub: PlanePath):
        """Both lifts of ``sub`` (starting at f(v)) leaving v."""
        dw0 = sub.dw(0.0)
        if dw0 == 0:
            raise NotABranchPoint("path has zero speed at f(v)")
        eps = abs(c) * rho * rho / abs(dw0)
        w_eps = sub.w(eps)
        root = cmath.sqrt((w_eps - fv) / c)
        out = []
        for sign in (1, -1):
            tr = _Tracker(target, sub, opts)
            s1, f_, f1_, r, _ = tr.correct(v + sign * root, w_eps, max_iter=20)
            rest = sub.subpath(eps, 1.0)
            cur = lift(target, rest, s1, replace(opts, h_init=rho))
            tau = np.concatenate([[0.0], eps + (1 - eps) * cur.tau])
            ss = np.concatenate([[v], cur.s])
            rr = np.concatenate([[_rel(fv, sub.w(0.0))], cur.residual])
            out.append((sign * root, LiftedCurve(tau, ss, rr, cur.termination, sub)))
        return out

    fwd = rays(path.subpath(tau_v, 1.0)) if tau_v < 1.0 else []
    bwd = rays(path.subpath(tau_v, 0.0)) if tau_v > 0.0 else []
    if not fwd or not bwd:
        curves = [cur for _, cur in (fwd or bwd)]
        if not fwd:
            # report them in the path's own direction
            curves = [_reverse_curve(cur, path, tau_v, backward=True) for cur in curves]
        else:
            curves = [_reparam(cur, path, tau_v) for cur in curves]
        return [cur.with_labels(branch_point=[v.real, v.imag]) for cur in curves]
    paired = []
    for d_f, cf in fwd:
        target_dir = d_f * 1j
        d_b, cb = min(bwd, key=lambda item: abs(cmath.phase(item[0] / target_dir)))
        back = _reverse_curve(cb, path, tau_v, backward=True)
        ahead = _reparam(cf, path, tau_v)
        tau = np.concatenate([back.tau, ahead.tau[1:]])
        ss = np.concatenate([back.s, ahead.s[1:]])
        rr = np.concatenate([back.residual, ahead.residual[1:]])
        paired.append(
            LiftedCurve(tau, ss, rr, cf.termination, path, meta={"branch_point": [v.real, v.imag], "start": cb.termination.to_json()})
        )
    return paired


def _reparam(cur: LiftedCurve, path: PlanePath, tau_v: float) -> LiftedCurve:
    """Map a curve on path.subpath(tau_v, 1) onto the parent parameter."""
    return replace(cur, tau=tau_v + (1 - tau_v) * cur.tau, path=path)


def _reverse_curve(cur: LiftedCurve, path: PlanePath, tau_v: float, backward: bool) -> LiftedCurve:
    """A curve on path.subpath(tau_v, 0) reversed into increasing parent tau."""
    tau = tau_v * (1 - cur.tau)
    return replace(cur, tau=tau[::-1], s=cur.s[::-1], residual=cur.residual[::-1], path=path)


def lift_through(
    target: AnalyticTarget,
    path: PlanePath,
    s_start: complex,
    opts: LiftOptions | None = None,
    max_branches: int = 3,
) -> list[LiftedCurve]:
    """Lift, continuing through simple branch points along both outgoing arcs."""
    opts = opts or LiftOptions()
    first = lift(target, path, s_start, opts)
    out = [first]
    pending = [(first, path, 0)]
    while pending:
        cur, cpath, depth = pending.pop(0)
        term = cur.termination
        if term.cause != BRANCH_POINT or depth >= max_branches or term.point is None:
            continue
        fv = target.eval(term.point)
        tau_last = float(cur.tau[-1])
        rest = cpath.subpath(tau_last, 1.0)
        tau_v = _locate_on_path(rest, fv)
        if abs(rest.w(tau_v) - fv) > 1e-8 * max(1.0, abs(fv)) or tau_v >= 1.0:
            continue
        try:
            arcs = branch_fan(target, term.point, rest.subpath(tau_v, 1.0), opts)
        except (NotABranchPoint, HigherOrderBranch):
            continue
        for arc in arcs:
            out.append(arc)
            pending.append((arc, arc.path, depth + 1))
    return out


# ---------------------------------------------------------------- pre-images of lines and circles


def gamma_prime_seeds(target: AnalyticTarget, window: Rect, sigma_seed: float = 25.0) -> list[tuple[int, complex]]:
    """(k, s) with s = sigma_seed + i t near t_k = (2 pi k + arg a2) / lambda2, f(s) real > 1."""
    if target.lambda2 is None or target.a2 is None or target.lambda2 <= 0 or target.a2 == 0:
        return []
    lam, arg = target.lambda2, cmath.phase(target.a2)
    k_lo = math.ceil((window.t_min * lam - arg) / (2 * math.pi))
    k_hi = math.floor((window.t_max * lam - arg) / (2 * math.pi))
    seeds = []
    for k in range(k_lo, k_hi + 1):
        t = (2 * math.pi * k + arg) / lam
        for _ in range(30):
            f, f1 = _jet1(target, complex(sigma_seed, t))
            if f1.real == 0:
                break
            step = f.imag / f1.real
            t -= step
            if abs(step) < 1e-15 * (1 + abs(t)):
                break
        s = complex(sigma_seed, t)
        f = target.eval(s)
        if target.real_coefficients and k == 0:
            s, f = complex(sigma_seed, 0.0), complex(target.eval(complex(sigma_seed, 0.0)).real, 0.0)
        if f.real > 1 and abs(f.imag) < 1e-12 * abs(f):
            seeds.append((k, s))
    return seeds


def _color_real(target_is_derivative: bool, sign: int) -> str:
    if target_is_derivative:
        return "c" if sign < 0 else "d"
    return "a" if sign < 0 else "b"


def preimage_real_axis(
    target: AnalyticTarget,
    window: Rect,
    seeds: list[complex] | None = None,
    gamma_seeds: list[tuple[int, complex]] | None = None,
    opts: LiftOptions | None = None,
    derivative: bool = False,
) -> list[LiftedCurve]:
    """Components of the pre-image of the real axis through the given seeds.

    ``seeds`` are zeros (f = 0); each yields the lift of (-inf, 0) (colour a,
    or c for a derivative target) and of (0, +inf) (colour b, or d).
    ``gamma_seeds`` are (k, s) pairs from :func:`gamma_prime_seeds`; each yields
    the Gamma'_k lift of (f(s), +inf), colour b.
    """
    opts = opts or LiftOptions()
    opts = replace(opts, window=window)
    curves = []
    for idx, z in enumerate(seeds or []):
        z = complex(z)
        parts = {}
        for sign in (-1, 1):
            parts[sign] = lift_through(target, PlanePath.real_interval(0.0, sign * math.inf), z, opts)
        # the component maps onto (-inf, 1) when its positive half runs off to sigma = +inf with f < 1
        covers = "R"
        for plus in parts[1]:
            term = plus.termination
            if term.cause == ESCAPED_WINDOW and term.edge == "right" and target.eval(plus.end).real < 1:
                covers = "(-inf, 1)"
        for sign in (-1, 1):
            for piece, cur in enumerate(parts[sign]):
                curves.append(
                    cur.with_labels(
                        tag="Upsilon" if derivative else "Gamma",
                        color=_color_real(derivative, sign),
                        seed=[z.real, z.imag],
                        seed_index=idx,
                        piece=piece,
                        covers=covers,
                    )
                )
    if gamma_seeds:
        sig = max(window.sigma_max, max(s.real for _, s in gamma_seeds))
        wide = replace(opts, window=Rect(window.sigma_min, sig + 1.0, window.t_min, window.t_max))
        for k, s in gamma_seeds:
            f0 = target.eval(s).real
            cur = lift(target, PlanePath.real_interval(f0, math.inf), complex(s.real, s.imag), wide)
            curves.append(cur.with_labels(tag=f"Gamma'_{k}", color="b", k=k, covers="(1, +inf)"))
    return curves


@dataclass
class CircleComponent:
    curve: LiftedCurve
    radius: float
    bounded: bool
    zeros: list[complex]
    crossings: list[complex]  # quarter-turn points (arg f a multiple of pi/2 from the landing angle)
    edges: list[str]

    def to_json(self) -> dict:
        return {
            "radius": self.radius,
            "bounded": self.bounded,
            "zeros": [[z.real, z.imag] for z in self.zeros],
            "exit_edges": self.edges,
            "curve": self.curve.to_json(),
        }


_LANDING_ANGLES = (math.pi, 0.5 * math.pi, -0.5 * math.pi, 0.0)


def _landing_point(target, z, r, opts):
    """A point p with |f(p)| = r on the level curve around z, and arg f(p).

    Angle 0 comes last: on components that reach sigma = +inf the lift of
    (0, r) may run off to the right instead of landing.
    """
    for ang in _LANDING_ANGLES:
        try:
            cur = lift(target, PlanePath.ray(ang, 0.0, r), complex(z), opts)
        except SeedMismatch:
            return None
        if cur.termination.cause == COMPLETED:
            return cur.end, ang
    return None


def preimage_circle(
    target: AnalyticTarget,
    r: float,
    window: Rect,
    zero_list: list[complex],
    opts: LiftOptions | None = None,
    max_turns: int = 32,
) -> list[CircleComponent]:
    """Components of |f| = r, each found from a zero it encloses.

    From every zero a ray (0, r e^{ia}) is lifted to a point p on the level
    curve; the circle |w| = r is then lifted a quarter turn at a time from p
    until the curve closes or leaves the window, in which case it is also
    traced backwards.  The quarter points are kept, so a later zero whose
    landing point was already visited joins the existing component.
    """
    if r <= 0:
        raise ValidationError("radius must be positive")
    opts = replace(opts or LiftOptions(), window=window)
    comps: list[CircleComponent] = []
    for z in zero_list:
        z = complex(z)
        hit = _landing_point(target, z, r, opts)
        if hit is None:
            continue
        p, ang = hit
        owner = next((c for c in comps if any(abs(p - q) < 1e-7 * (1 + abs(p)) for q in c.crossings)), None)
        if owner is not None:
            owner.zeros.append(z)
            continue
        comps.append(_trace_circle_component(target, r, p, ang, z, opts, max_turns))
    return comps


def _trace_circle_component(target, r, p, ang, z, opts, max_turns):
    crossings = [p]
    pieces = []
    start = p
    closed = False
    edges = []
    for q in range(4 * max_turns):
        cur = lift(target, PlanePath.circle(r, ang + 0.5 * math.pi * q, 0.25), start, opts)
        pieces.append(cur)
        if cur.termination.cause != COMPLETED:
            if cur.termination.edge:
                edges.append(cur.termination.edge)
            break
        start = cur.end
        if abs(start - p) < 1e-6 * (1 + abs(p)):
            closed = True
            break
        crossings.append(start)
    back_pieces = []
    if not closed:
        start = p
        for q in range(4 * max_turns):
            cur = lift(target, PlanePath.circle(r, ang - 0.5 * math.pi * q, -0.25), start, opts)
            back_pieces.append(cur)
            if cur.termination.cause != COMPLETED:
                if cur.termination.edge:
                    edges.append(cur.termination.edge)
                break
            start = cur.end
            crossings.append(start)
    # stitch into one curve whose tau counts turns: backward turns are negative
    taus, ss, rs = [], [], []
    for k in reversed(range(len(back_pieces))):
        cur = back_pieces[k]
        taus.append(-0.25 * (k + cur.tau[::-1]))
        ss.append(cur.s[::-1])
        rs.append(cur.residual[::-1])
    for k, cur in enumerate(pieces):
        taus.append(0.25 * (k + cur.tau))
        ss.append(cur.s)
        rs.append(cur.residual)
    tau = np.concatenate(taus)
    s = np.concatenate(ss)
    res = np.concatenate(rs)
    keep = np.concatenate([[True], np.abs(np.diff(s)) > 0])
    last = pieces[-1].termination
    curve = LiftedCurve(
        tau[keep], s[keep], res[keep], last, PlanePath.circle(r, ang, 1.0), tag="level-curve", meta={"radius": r, "closed": closed}
    )
    return CircleComponent(curve, r, closed, [z], crossings, edges)
