"""Deterministic SVG figures: polygon, cuts, nodes and verdict points.

Frame: 100 px per lattice unit, y axis up.  Coordinates are printed with a
fixed number of decimals so repeated runs give identical bytes.
"""

from __future__ import annotations

from fractions import Fraction

from .affine import add
from .displace import Status
from .semitoric import SemitoricPolygon

UNIT = 100
MARGIN = 20
RAY_EXTENT = 2  # lattice units drawn past the finite part of an unbounded polygon

STATUS_COLORS = {
    Status.DISPLACEABLE_BY_PROBE: "#2b8a3e",
    Status.DISPLACEABLE_BY_RECTANGLE: "#1971c2",
    Status.DISPLACEABLE_BY_FACT: "#5f3dc4",
    Status.NONDISPLACEABLE_SPHERE: "#e8590c",
    Status.NONDISPLACEABLE_STEM: "#c92a2a",
    Status.NONDISPLACEABLE_BY_FACT: "#a61e4d",
    Status.UNKNOWN: "#f08c00",
}


def _num(v) -> str:
    return f"{float(v):.3f}"


def _outline(sp: SemitoricPolygon, window=None) -> list:
    poly = sp.polygon
    pts = list(poly.vertices)
    if poly.bounded:
        return pts
    r_in, r_out = poly.rays
    span = RAY_EXTENT
    if window is not None:
        span = max(span, max(abs(Fraction(v)) for v in window) * 2)
    return [add(pts[0], r_in, span)] + pts + [add(pts[-1], r_out, span)]


def render_svg(sp: SemitoricPolygon, marks=None, window=None) -> str:
    """SVG text for ``sp``; ``marks`` is an optional list of (point, Status)."""
    marks = list(marks or [])
    outline = _outline(sp, window)
    everything = outline + [n.position for n in sp.nodes] + [p for p, _ in marks]
    xs = [p[0] for p in everything]
    ys = [p[1] for p in everything]
    if window is not None:
        xs += [Fraction(window[0]), Fraction(window[1])]
        if len(window) >= 4:
            ys += [Fraction(window[2]), Fraction(window[3])]
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    width = float(x1 - x0) * UNIT + 2 * MARGIN
    height = float(y1 - y0) * UNIT + 2 * MARGIN

    def px(p):
        return _num((p[0] - x0) * UNIT + MARGIN), _num((y1 - p[1]) * UNIT + MARGIN)

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" height="{height:.0f}" '
        f'viewBox="0 0 {width:.3f} {height:.3f}">',
    ]
    path = " ".join(("M" if i == 0 else "L") + " {} {}".format(*px(p)) for i, p in enumerate(outline))
    close = " Z" if sp.polygon.bounded else ""
    if sp.polygon.bounded:
        lines.append(f'<path class="polygon" d="{path}{close}" fill="#f1f3f5" stroke="#212529" stroke-width="2"/>')
    else:
        lines.append(f'<path class="polygon-fill" d="{path} Z" fill="#f1f3f5" stroke="none"/>')
        lines.append(f'<path class="polygon" d="{path}" fill="none" stroke="#212529" stroke-width="2"/>')
    for a, b in sp.cuts():
        (ax, ay), (bx, by) = px(a), px(b)
        lines.append(f'<line class="cut" x1="{ax}" y1="{ay}" x2="{bx}" y2="{by}" '
                     'stroke="#c92a2a" stroke-width="2" stroke-dasharray="6 4"/>')
    for p, status in marks:
        cx, cy = px(p)
        # fibers the engine could not displace are drawn larger
        kind, r = ("mark", 3) if status.displaceable else ("highlight", 6)
        lines.append(f'<circle class="{kind} {status.value}" cx="{cx}" cy="{cy}" r="{r}" '
                     f'fill="{STATUS_COLORS[status]}"/>')
    for n in sp.nodes:
        cx, cy = px(n.position)
        lines.append(f'<circle class="node" cx="{cx}" cy="{cy}" r="6" fill="#e03131" stroke="#000000" '
                     'stroke-width="1"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
