"""Minimal SVG writer for plots of the s-plane.

Output is a pure function of the drawn items (fixed number formatting, no
timestamps or generated ids), so identical input gives identical bytes.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from typing import Iterable

from .zeros import Rect

DEFAULT_COLORS = {"a": "#d62728", "b": "#1f77b4", "c": "#2ca02c", "d": "#ff7f0e", "none": "#555555"}


def _fmt(x: float) -> str:
    return f"{x:.3f}"


@dataclass
class PlaneFigure:
    window: Rect
    width: float = 800.0
    margin: float = 40.0
    title: str = ""
    colors: dict = field(default_factory=lambda: dict(DEFAULT_COLORS))
    stroke: float = 1.2
    _items: list[ET.Element] = field(default_factory=list)

    @property
    def scale(self) -> float:
        return (self.width - 2 * self.margin) / self.window.width

    @property
    def height(self) -> float:
        return self.window.height * self.scale + 2 * self.margin

    def xy(self, s: complex) -> tuple[float, float]:
        x = self.margin + (s.real - self.window.sigma_min) * self.scale
        y = self.margin + (self.window.t_max - s.imag) * self.scale
        return x, y

    def polyline(self, pts: Iterable[complex], color: str = "none", width: float | None = None, dash: str | None = None) -> None:
        coords = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in (self.xy(complex(p)) for p in pts))
        if not coords:
            return
        el = ET.Element(
            "polyline",
            {
                "points": coords,
                "fill": "none",
                "stroke": self.colors.get(color, color),
                "stroke-width": _fmt(width or self.stroke),
            },
        )
        if dash:
            el.set("stroke-dasharray", dash)
        self._items.append(el)

    def polygon(self, pts: Iterable[complex], fill: str, opacity: float = 0.2) -> None:
        coords = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in (self.xy(complex(p)) for p in pts))
        self._items.append(ET.Element("polygon", {"points": coords, "fill": fill, "fill-opacity": _fmt(opacity), "stroke": "none"}))

    def point(self, s: complex, hollow: bool = False, r: float = 3.0, color: str = "#000000") -> None:
        x, y = self.xy(complex(s))
        attrs = {"cx": _fmt(x), "cy": _fmt(y), "r": _fmt(r)}
        attrs.update({"fill": "none", "stroke": color} if hollow else {"fill": color})
        self._items.append(ET.Element("circle", attrs))

    def text(self, s: complex, label: str, size: float = 10.0) -> None:
        x, y = self.xy(complex(s))
        el = ET.Element("text", {"x": _fmt(x), "y": _fmt(y), "font-size": _fmt(size), "font-family": "sans-serif"})
        el.text = label
        self._items.append(el)

    def _frame(self) -> list[ET.Element]:
        w = self.window
        out = []
        x0, y0 = self.xy(complex(w.sigma_min, w.t_max))
        out.append(
            ET.Element(
                "rect",
                {
                    "x": _fmt(x0),
                    "y": _fmt(y0),
                    "width": _fmt(w.width * self.scale),
                    "height": _fmt(w.height * self.scale),
                    "fill": "none",
                    "stroke": "#000000",
                    "stroke-width": "0.800",
                },
            )
        )
        guides = []
        for sig in (0.0, 0.5, 1.0):
            if w.sigma_min < sig < w.sigma_max:
                guides.append((complex(sig, w.t_min), complex(sig, w.t_max)))
        if w.t_min < 0 < w.t_max:
            guides.append((complex(w.sigma_min, 0), complex(w.sigma_max, 0)))
        for a, b in guides:
            (xa, ya), (xb, yb) = self.xy(a), self.xy(b)
            out.append(
                ET.Element(
                    "line",
                    {"x1": _fmt(xa), "y1": _fmt(ya), "x2": _fmt(xb), "y2": _fmt(yb), "stroke": "#bbbbbb", "stroke-width": "0.500", "stroke-dasharray": "3,3"},
                )
            )
        return out

    def render(self) -> str:
        root = ET.Element(
            "svg",
            {
                "xmlns": "http://www.w3.org/2000/svg",
                "width": _fmt(self.width),
                "height": _fmt(self.height),
                "viewBox": f"0 0 {_fmt(self.width)} {_fmt(self.height)}",
            },
        )
        if self.title:
            t = ET.SubElement(root, "title")
            t.text = self.title
        for el in self._frame() + self._items:
            root.append(el)
        w = self.window
        for s, label, anchor in (
            (complex(w.sigma_min, w.t_min), f"{w.sigma_min:g}", "start"),
            (complex(w.sigma_max, w.t_min), f"{w.sigma_max:g}", "end"),
        ):
            x, y = self.xy(s)
            el = ET.SubElement(root, "text", {"x": _fmt(x), "y": _fmt(y + 14), "font-size": "10.000", "text-anchor": anchor, "font-family": "sans-serif"})
            el.text = label
        for s, label in ((complex(w.sigma_min, w.t_min), f"{w.t_min:g}"), (complex(w.sigma_min, w.t_max), f"{w.t_max:g}")):
            x, y = self.xy(s)
            el = ET.SubElement(root, "text", {"x": _fmt(x - 4), "y": _fmt(y), "font-size": "10.000", "text-anchor": "end", "font-family": "sans-serif"})
            el.text = label
        ET.indent(root, space=" ")
        return '<?xml version="1.0" encoding="UTF-8"?>\n' + ET.tostring(root, encoding="unicode") + "\n"
