"""Command line interface.

    dirichlet-geometry atlas --target zeta --window -10,12,0,60 --out run/

Exit status is 0 on success, 2 for invalid configuration or input and 3
when a numerical method fails.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

from . import io as dio
from .atlas import build_atlas, probe_symmetric_pair
from .bohr import basis_for, map_zero_to_bohr
from .errors import NumericFailure, ValidationError
from .lifting import LiftOptions, gamma_prime_seeds, lift, preimage_circle, preimage_real_axis
from .paths import path_from_json
from .series import convergence_report
from .svg import DEFAULT_COLORS, PlaneFigure
from .targets import AnalyticTarget, target_from_json
from .zeros import Rect, find_zeros

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERIC = 0, 2, 3
PLOTS = ("real-axis-preimage", "unit-circle-preimage", "strip", "domains", "probe")
DEFAULT_WINDOW = "-10,12,0,60"


class ConfigError(ValidationError):
    pass


@dataclass(frozen=True)
class RunConfig:
    target: dict
    window: Rect
    corrector_tol: float = 1e-9
    zero_tol: float = 1e-10
    branch_tol: float = 1e-6
    out: Path | None = None
    fmt: str = "json"
    decimation: int = 1
    colors: dict = field(default_factory=lambda: dict(DEFAULT_COLORS))
    stroke: float = 1.2
    sigma_seed: float = 25.0

    def lift_options(self) -> LiftOptions:
        return LiftOptions(corrector_tol=self.corrector_tol, branch_tol=self.branch_tol)

    def build_target(self) -> AnalyticTarget:
        return target_from_json(self.target)


# ---------------------------------------------------------------- configuration


def target_doc(kind: str) -> dict:
    """Target document for the --target shorthand.

    zeta | dirichlet-l:MOD[:INDEX] | two-term (1 + 2^-s) | an inline JSON document
    """
    kind = kind.strip()
    if kind.startswith("{"):
        try:
            return json.loads(kind)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"--target: bad JSON at column {exc.colno}: {exc.msg}") from None
    if kind == "zeta":
        return {"kind": "zeta"}
    if kind == "two-term":
        return {"label": "1+2^-s", "terms": [[0.0, 1.0], [math.log(2), 1.0]]}
    if kind.startswith("dirichlet-l:"):
        parts = kind.split(":")[1:]
        try:
            nums = [int(p) for p in parts]
        except ValueError:
            raise ConfigError(f"--target {kind!r}: modulus and index must be integers") from None
        if not 1 <= len(nums) <= 2:
            raise ConfigError(f"--target {kind!r}: expected dirichlet-l:MOD[:INDEX]")
        return {"kind": "dirichlet-l", "modulus": nums[0], "character_index": nums[1] if len(nums) > 1 else 1}
    raise ConfigError(f"--target {kind!r}: unknown kind (zeta, two-term, dirichlet-l:MOD[:INDEX] or JSON)")


_CONFIG_KEYS = {"target", "window", "tolerances", "out", "format", "figure", "sigma_seed"}


def _line_of(text: str, key: str) -> int:
    for i, line in enumerate(text.splitlines(), 1):
        if re.search(rf'"{re.escape(key)}"\s*:', line):
            return i
    return 1


def load_config(path: Path) -> tuple[dict, str]:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}:1: top level must be an object")
    for key in doc:
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"{path}:{_line_of(text, key)}: unknown key {key!r}")
    return doc, text


def _positive(value, where: str) -> float:
    try:
        x = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{where}: expected a number, got {value!r}") from None
    if not x > 0:
        raise ConfigError(f"{where}: must be positive")
    return x


def make_config(args: argparse.Namespace) -> RunConfig:
    doc, text, src = {}, "", "<flags>"
    if args.config:
        doc, text = load_config(Path(args.config))
        src = args.config

    def where(key):
        return f"{src}:{_line_of(text, key)}" if key in doc else f"--{key}"

    target = target_doc(args.target) if args.target else doc.get("target", {"kind": "zeta"})
    if not isinstance(target, dict):
        raise ConfigError(f"{where('target')}: target must be an object")
    window_spec = args.window or doc.get("window", DEFAULT_WINDOW)
    try:
        if isinstance(window_spec, str):
            window = Rect.parse(window_spec)
        else:
            window = Rect(*[float(v) for v in window_spec])
    except (ValidationError, TypeError, ValueError) as exc:
        raise ConfigError(f"{where('window')}: {exc}") from None
    tol = doc.get("tolerances", {})
    fig = doc.get("figure", {})
    if not isinstance(tol, dict) or not isinstance(fig, dict):
        raise ConfigError(f"{where('tolerances' if not isinstance(tol, dict) else 'figure')}: must be an object")
    fmt = args.format or doc.get("format", "json")
    if fmt not in ("json", "csv", "svg"):
        raise ConfigError(f"{where('format')}: format must be json, csv or svg")
    decimation = args.seed_decimation if args.seed_decimation is not None else fig.get("decimation", 1)
    if not isinstance(decimation, int) or decimation < 1:
        raise ConfigError(f"{where('figure')}: decimation must be a positive integer")
    colors = dict(DEFAULT_COLORS)
    colors.update(fig.get("colors", {}))
    out = args.out or doc.get("out")
    return RunConfig(
        target=target,
        window=window,
        corrector_tol=_positive(tol.get("corrector", 1e-9), where("tolerances")),
        zero_tol=_positive(tol.get("zero", 1e-10), where("tolerances")),
        branch_tol=_positive(tol.get("branch", 1e-6), where("tolerances")),
        out=Path(out) if out else None,
        fmt=fmt,
        decimation=decimation,
        colors=colors,
        stroke=_positive(fig.get("stroke_width", 1.2), where("figure")),
        sigma_seed=_positive(doc.get("sigma_seed", 25.0), where("sigma_seed")),
    )


def parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise ConfigError(f"cannot read {text!r} as a complex number") from None


# ---------------------------------------------------------------- output


def emit(cfg: RunConfig, name: str, obj=None, table: tuple | None = None) -> None:
    """Write ``obj`` (JSON) or ``table`` (header, rows as CSV) per the configured format."""
    if cfg.fmt == "csv":
        if table is None:
            raise ConfigError(f"{name}: no CSV form; use --format json")
        text, ext = dio.to_csv_text(*table), "csv"
    else:
        if obj is None:
            raise ConfigError(f"{name}: no JSON form; use --format csv")
        text, ext = dio.to_json_text(obj), "json"
    if cfg.out is None:
        sys.stdout.write(text)
    else:
        print(dio.write_text(cfg.out / f"{name}.{ext}", text))


def _window_zeros(cfg, target, derivative=False):
    w = cfg.window
    found = find_zeros(target, w.expand(0.5), tol=cfg.zero_tol, use_derivative=derivative)
    return [z for z in found if w.contains(z.s, margin=1e-9)]


# ---------------------------------------------------------------- commands


def cmd_abscissa(cfg: RunConfig, args) -> None:
    target = cfg.build_target()
    if target.series is None:
        raise ConfigError(f"{target.label}: no coefficient series to analyse")
    rep = convergence_report(target.series, args.n_max)
    emit(cfg, "abscissa", rep.to_json(), (("sigma_c", "sigma_a", "hadamard_radius", "n_used"), [tuple(rep.to_json().values())]))


def cmd_eval(cfg: RunConfig, args) -> None:
    target = cfg.build_target()
    s = parse_complex(args.s)
    f, f1 = target.jet(s, 1)
    # a second evaluation with a longer direct sum and more correction terms
    ref_doc = dict(cfg.target)
    if ref_doc.get("kind") in ("zeta", "dirichlet-l"):
        ref_doc["terms_N"] = 2 * max(50, int(2 * abs(s.imag)))
        ref_doc["bernoulli_K"] = 16
    g = target_from_json(ref_doc).eval(s)
    out = {"s": s, "value": f, "derivative": f1, "error_estimate": abs(f - g)}
    emit(cfg, "eval", out, (("sigma", "t", "re", "im", "re_deriv", "im_deriv", "error"), [(s.real, s.imag, f.real, f.imag, f1.real, f1.imag, abs(f - g))]))


def cmd_zeros(cfg: RunConfig, args) -> None:
    target = cfg.build_target()
    zs = _window_zeros(cfg, target, args.derivative)
    emit(cfg, "zeros", {"target": target.label, "window": cfg.window.to_json(), "zeros": [z.to_json() for z in zs]}, (dio.ZERO_HEADER, dio.zero_rows(zs)))


def cmd_trace(cfg: RunConfig, args) -> None:
    target = cfg.build_target()
    try:
        path = path_from_json(json.loads(args.path))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"--path: bad JSON at column {exc.colno}: {exc.msg}") from None
    opts = LiftOptions(corrector_tol=cfg.corrector_tol, branch_tol=cfg.branch_tol, window=cfg.window)
    cur = lift(target, path, parse_complex(args.seed), opts)
    emit(cfg, "trace", cur.to_json(), (dio.CURVE_HEADER, dio.curve_rows([cur], cfg.decimation)))


def cmd_atlas(cfg: RunConfig, args) -> None:
    atlas = build_atlas(cfg.build_target(), cfg.window, cfg.lift_options(), cfg.sigma_seed)
    header = ("k", "complete", "j_k", "deriv", "merge_internal", "domains", "windings", "rule_violations")
    rows = [tuple(r[h] if h != "windings" else " ".join(str(w) for w in r[h]) for h in header) for r in atlas.summary()]
    table = dio.to_csv_text(header, rows)
    if cfg.out is None:
        emit(cfg, "atlas", atlas.to_json(), (header, rows))
        if cfg.fmt == "json":
            sys.stderr.write(table)
        return
    print(dio.write_text(cfg.out / "atlas.json", dio.to_json_text(atlas.to_json())))
    print(dio.write_text(cfg.out / "atlas_summary.csv", table))
    sys.stdout.write(table)


def cmd_domains(cfg: RunConfig, args) -> None:
    atlas = build_atlas(cfg.build_target(), cfg.window, cfg.lift_options(), cfg.sigma_seed, with_rules=False)
    st = atlas.strip(args.k)
    if st is None:
        raise ConfigError(f"--k {args.k}: no strip with that index in {cfg.window.to_json()}; have {[s.k for s in atlas.strips]}")
    rows = [(i, j, x, y) for i, d in enumerate(st.domains) for j, (x, y) in enumerate(d.polygon.exterior.coords)]
    emit(cfg, f"domains_k{args.k}", {"k": st.k, "j_k": st.j_k, "notes": st.notes, "domains": [d.to_json() for d in st.domains]}, (("domain", "vertex", "sigma", "t"), rows))


def cmd_probe(cfg: RunConfig, args) -> None:
    rep = probe_symmetric_pair(cfg.build_target(), args.sigma, args.t, args.samples)
    rows = [(float(l), z.real, z.imag, Z.real, Z.imag) for l, z, Z in zip(rep.lam, rep.z, rep.Z)]
    emit(cfg, "probe", rep.to_json(), (("lambda", "re_z", "im_z", "re_Z", "im_Z"), rows))


def cmd_bohr(cfg: RunConfig, args) -> None:
    target = cfg.build_target()
    if target.series is None:
        raise ConfigError(f"{target.label}: no coefficient series for a Bohr basis")
    basis = basis_for(target.series, args.n_max)
    zs = [z for z in _window_zeros(cfg, target) if z.kind != "trivial"]
    lifted = [{"zero": z.s, "coordinates": map_zero_to_bohr(z.s, basis)} for z in zs]
    rows = [(i, k, c.real, c.imag, b) for i, item in enumerate(lifted) for k, (c, b) in enumerate(zip(item["coordinates"], basis.betas))]
    emit(cfg, "bohr", {"basis": basis.to_json(), "zeros": lifted}, (("zero", "k", "re_z", "im_z", "beta"), rows))


# ---------------------------------------------------------------- plots


def _figure(cfg: RunConfig, title: str, window: Rect | None = None) -> PlaneFigure:
    return PlaneFigure(window or cfg.window, title=title, colors=cfg.colors, stroke=cfg.stroke)


def _draw_curves(fig, cfg, curves):
    for cur in curves:
        fig.polyline(cur.s[:: cfg.decimation].tolist() + [cur.end], cur.color)


def _draw_zeros(fig, zeros, dzeros=()):
    for z in zeros:
        fig.point(z.s)
    for v in dzeros:
        fig.point(v.s, hollow=True)


def cmd_plot(cfg: RunConfig, args) -> None:
    if cfg.out is None:
        raise ConfigError("plot writes an SVG and its data files: give --out DIR")
    target = cfg.build_target()
    w = cfg.window
    what = args.what
    tables: dict[str, tuple] = {}
    opts = cfg.lift_options()
    if what in ("real-axis-preimage", "unit-circle-preimage"):
        zs = _window_zeros(cfg, target)
        dz = _window_zeros(cfg, target, derivative=True)
        fig = _figure(cfg, f"{target.label}: {what}")
        if what == "real-axis-preimage":
            pad = 2 * math.pi / target.lambda2 if target.lambda2 else 0.0
            padded = Rect(w.sigma_min, w.sigma_max, w.t_min - pad, w.t_max + pad)
            seeds = gamma_prime_seeds(target, padded, cfg.sigma_seed) if target.lambda2 else []
            curves = preimage_real_axis(target, padded, gamma_seeds=seeds, opts=opts)
            curves += preimage_real_axis(target, w, seeds=[z.s for z in zs], opts=opts)
            if args.overlay_derivative:
                curves += preimage_real_axis(target.derivative(), w, seeds=[v.s for v in dz], opts=opts, derivative=True)
        else:
            comps = preimage_circle(target, 1.0, w, [z.s for z in zs], opts)
            curves = [c.curve.with_labels(color="b" if not c.bounded else "a") for c in comps]
        _draw_curves(fig, cfg, curves)
        _draw_zeros(fig, zs, dz)
        tables["curves"] = (dio.CURVE_HEADER, dio.curve_rows(curves, cfg.decimation))
        tables["zeros"] = (dio.ZERO_HEADER, dio.zero_rows(zs + dz))
    elif what in ("strip", "domains"):
        atlas = build_atlas(target, w, opts, cfg.sigma_seed, with_domains=what == "domains", with_rules=False)
        fig = _figure(cfg, f"{target.label}: {what}")
        fills = ("#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd")
        rows = []
        for i, st in enumerate(atlas.strips):
            polys = [st.polygon] if what == "strip" else [d.polygon for d in st.domains]
            for j, poly in enumerate(polys):
                pts = [complex(x, y) for x, y in poly.exterior.coords]
                fig.polygon(pts, fills[(i + j) % len(fills)])
                rows += [(st.k, j, p.real, p.imag) for p in pts]
            fig.text(complex(w.sigma_max - 0.06 * w.width, st.polygon.representative_point().y), f"S{st.k}")
        _draw_curves(fig, cfg, atlas.gamma_prime)
        _draw_zeros(fig, atlas.zeros, atlas.derivative_zeros)
        tables["regions"] = (("k", "piece", "sigma", "t"), rows)
        tables["curves"] = (dio.CURVE_HEADER, dio.curve_rows(atlas.gamma_prime, cfg.decimation))
        tables["zeros"] = (dio.ZERO_HEADER, dio.zero_rows(atlas.zeros + atlas.derivative_zeros))
    elif what == "probe":
        rep = probe_symmetric_pair(target, args.sigma, args.t, args.samples)
        pts = list(rep.z) + list(rep.Z) + [0j]
        lo_r, hi_r = min(p.real for p in pts), max(p.real for p in pts)
        lo_i, hi_i = min(p.imag for p in pts), max(p.imag for p in pts)
        pad = 0.05 * max(hi_r - lo_r, hi_i - lo_i, 1e-3)
        fig = _figure(cfg, f"{target.label}: images of the probe segment", Rect(lo_r - pad, hi_r + pad, lo_i - pad, hi_i + pad))
        fig.polyline(rep.z[:: cfg.decimation], "b")
        fig.polyline(rep.Z[:: cfg.decimation], "d")
        for e in rep.crossing_events:
            fig.point(complex(e.value, 0.0), hollow=e.which != "gamma-crosses-R")
        tables["probe"] = (("lambda", "re_z", "im_z", "re_Z", "im_Z"), [(float(l), z.real, z.imag, Z.real, Z.imag) for l, z, Z in zip(rep.lam, rep.z, rep.Z)])
        tables["events"] = (("lambda", "which", "sign", "value"), [(e.lam, e.which, e.sign, e.value) for e in rep.crossing_events])
    else:
        raise ConfigError(f"unknown plot {what!r}")
    stem = what.replace("-", "_")
    print(dio.write_text(cfg.out / f"{stem}.svg", fig.render()))
    for name, (header, rows) in tables.items():
        print(dio.write_text(cfg.out / f"{stem}_{name}.csv", dio.to_csv_text(header, rows)))


# ---------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--out", help="output directory (default: stdout)")
    common.add_argument("--window", help="sigma_min,sigma_max,t_min,t_max")
    common.add_argument("--target", help="zeta | two-term | dirichlet-l:MOD[:INDEX] | JSON document")
    common.add_argument("--seed-decimation", type=int, help="keep every N-th curve sample in exports and figures")
    common.add_argument("--format", choices=("json", "csv", "svg"))

    p = argparse.ArgumentParser(prog="dirichlet-geometry", description="Pre-image geometry of Dirichlet series.")
    sub = p.add_subparsers(dest="command", required=True)
    sp = sub.add_parser("abscissa", parents=[common], help="convergence abscissa estimates")
    sp.add_argument("--n-max", type=int)
    sp = sub.add_parser("eval", parents=[common], help="value and derivative at a point")
    sp.add_argument("--s", required=True, help="point, e.g. 0.5+14.1j")
    sp = sub.add_parser("zeros", parents=[common], help="zero catalogue of the window")
    sp.add_argument("--derivative", action="store_true", help="zeros of f' instead of f")
    sp = sub.add_parser("trace", parents=[common], help="lift a w-plane path")
    sp.add_argument("--path", required=True, help='path JSON, e.g. {"kind": "segment", "params": [[2, 0], [1.2, 0]]}')
    sp.add_argument("--seed", required=True, help="start point s with f(s) = w(0)")
    sub.add_parser("atlas", parents=[common], help="strips, merge trees, domains and rule checks")
    sp = sub.add_parser("domains", parents=[common], help="fundamental domains of one strip")
    sp.add_argument("--k", type=int, required=True)
    for name in ("probe", "plot"):
        sp = sub.add_parser(name, parents=[common], help="symmetric-pair probe" if name == "probe" else "SVG figures")
        sp.add_argument("--sigma", type=float, default=0.3)
        sp.add_argument("--t", type=float, default=14.134725)
        sp.add_argument("--samples", type=int, default=1000)
        if name == "plot":
            sp.add_argument("--what", choices=PLOTS, required=True)
            sp.add_argument("--overlay-derivative", action="store_true", help="add the f' pre-image (colours c, d)")
    sp = sub.add_parser("bohr", parents=[common], help="Bohr basis and lifted zeros")
    sp.add_argument("--n-max", type=int, default=200)
    return p


COMMANDS = {
    "abscissa": cmd_abscissa,
    "eval": cmd_eval,
    "zeros": cmd_zeros,
    "trace": cmd_trace,
    "atlas": cmd_atlas,
    "domains": cmd_domains,
    "probe": cmd_probe,
    "bohr": cmd_bohr,
    "plot": cmd_plot,
}


NEGATIVE_OK = ("--window", "--s", "--seed", "--sigma", "--t")


def _join_negative(argv: list[str]) -> list[str]:
    """Let ``--window -10,12,0,60`` or ``--s -3+1j`` through: argparse would read the value as an option."""
    out, i = [], 0
    while i < len(argv):
        if argv[i] in NEGATIVE_OK and i + 1 < len(argv):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_join_negative(argv))
    try:
        cfg = make_config(args)
        if args.command == "plot":
            cfg = replace(cfg, fmt="svg")
        elif cfg.fmt == "svg":
            raise ConfigError("--format svg is only available for plot")
        COMMANDS[args.command](cfg, args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericFailure as exc:
        print(f"numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except BrokenPipeError:
        # reader closed early (e.g. piped into head); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
