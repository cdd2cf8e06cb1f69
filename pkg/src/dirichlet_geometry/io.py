"""JSON and CSV export with stable, byte-reproducible formatting."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from .lifting import LiftedCurve
from .zeros import Zero


def _plain(obj: Any) -> Any:
    """Replace values JSON cannot hold: complex, numpy scalars and non-finite floats."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (complex, np.complexfloating)):
        return [_plain(float(obj.real)), _plain(float(obj.imag))]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def to_json_text(obj: Any) -> str:
    return json.dumps(_plain(obj), indent=1, allow_nan=False) + "\n"


def to_csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def write_text(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return path


CURVE_HEADER = ("curve", "tag", "color", "tau", "sigma", "t", "residual")
ZERO_HEADER = ("sigma", "t", "kind", "multiplicity", "residual", "of_derivative")


def curve_rows(curves: Sequence[LiftedCurve], decimation: int = 1) -> list[tuple]:
    """One row per kept sample; the last sample of each curve is always kept."""
    rows = []
    for i, cur in enumerate(curves):
        n = len(cur)
        keep = list(range(0, n, max(1, decimation)))
        if n and keep[-1] != n - 1:
            keep.append(n - 1)
        for j in keep:
            s = cur.s[j]
            rows.append((i, cur.tag or "", cur.color, float(cur.tau[j]), float(s.real), float(s.imag), float(cur.residual[j])))
    return rows


def zero_rows(zeros: Sequence[Zero]) -> list[tuple]:
    return [(z.s.real, z.s.imag, z.kind, z.multiplicity, z.residual, z.of_derivative) for z in zeros]
