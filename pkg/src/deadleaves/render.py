"""SVG pictures of tessellations.

2D: visible arcs as polylines, branch points as dots, optional shading of
the visible leaf patches.  1D: space-time diagram with every leaf drawn as a
bar at its arrival time (thick if partly visible) and eta as ticks.
"""

from __future__ import annotations

import math

import numpy as np

from .dlm1d import Tessellation1D
from .dlm2d import PlanarTessellation

ARC_STEP = 0.05  # radians per polyline segment on circular arcs


def _num(v: float) -> str:
    s = f"{v:.4f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def _header(width: float, height: float) -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_num(width)}" height="{_num(height)}" '
        f'viewBox="0 0 {_num(width)} {_num(height)}">',
    ]


def arc_polyline(cx: float, cy: float, r: float, t0: float, t1: float, step: float = ARC_STEP) -> np.ndarray:
    n = max(2, int(math.ceil((t1 - t0) / step)) + 1)
    t = np.linspace(t0, t1, n)
    return np.stack([cx + r * np.cos(t), cy + r * np.sin(t)], axis=1)


def render_svg(tess, scale: float | None = None, shade: bool = False, size: float = 800.0) -> str:
    if isinstance(tess, PlanarTessellation):
        return _render_2d(tess, scale, shade, size)
    if isinstance(tess, Tessellation1D):
        return _render_1d(tess, scale, size)
    raise TypeError("render_svg needs a 1D or planar tessellation")


def svg_scale(tess, size: float = 800.0) -> float:
    """Pixels per unit length used when no scale is given."""
    if isinstance(tess, PlanarTessellation):
        x0, y0, x1, y1 = tess.box
        return size / max(x1 - x0, y1 - y0)
    return size / tess.n


def _render_2d(tess: PlanarTessellation, scale, shade: bool, size: float) -> str:
    x0, y0, x1, y1 = tess.box
    k = svg_scale(tess, size) if scale is None else scale
    W, H = (x1 - x0) * k, (y1 - y0) * k

    def px(p):
        return [f"{_num((x - x0) * k)},{_num((y1 - y) * k)}" for x, y in p]

    out = _header(W, H)
    out.append(f'<rect x="0" y="0" width="{_num(W)}" height="{_num(H)}" fill="white" stroke="black" stroke-width="1"/>')
    if shade:
        out.extend(_shading(tess, k))
    out.append('<g class="arcs" fill="none" stroke="black" stroke-width="1">')
    for a in tess.arcs:
        if a.kind == "arc":
            pts = arc_polyline(*a.params)
        else:
            pts = np.array([a.params[:2], a.params[2:]])
        out.append(f'<polyline class="arc" data-leaf="{a.leaf_id}" points="{" ".join(px(pts))}"/>')
    out.append("</g>")
    out.append('<g class="branch" fill="red" stroke="none">')
    for x, y in tess.branch_points:
        out.append(f'<circle cx="{_num((x - x0) * k)}" cy="{_num((y1 - y) * k)}" r="2"/>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _shading(tess: PlanarTessellation, k: float) -> list[str]:
    """Grey level per visible leaf, drawn as a coarse raster of the top leaf."""
    x0, y0, x1, y1 = tess.box
    n = 100
    h = max(x1 - x0, y1 - y0) / n
    xs = x0 + (np.arange(int(math.ceil((x1 - x0) / h))) + 0.5) * h
    ys = y0 + (np.arange(int(math.ceil((y1 - y0) / h))) + 0.5) * h
    gx, gy = np.meshgrid(xs, ys)
    pts = np.stack([gx.ravel(), gy.ravel()], axis=1)
    none = np.full(len(pts), -5)
    top = tess.leaves.first_cover(pts, none, none)
    out = ['<g class="cells" stroke="none">']
    for (x, y), j in zip(pts, top):
        g = 150 + int((int(j) * 2654435761) % 100)
        out.append(f'<rect x="{_num((x - h / 2 - x0) * k)}" y="{_num((y1 - y - h / 2) * k)}" width="{_num(h * k)}" '
                   f'height="{_num(h * k)}" fill="rgb({g},{g},{g})"/>')
    out.append("</g>")
    return out


def _render_1d(tess: Tessellation1D, scale, size: float) -> str:
    k = svg_scale(tess, size) if scale is None else scale
    times = tess.times
    tmax = float(times.max()) if len(times) else 1.0
    W = tess.n * k
    H = 0.5 * W if W > 0 else 100.0
    top, axis = 10.0, H - 20.0
    tk = (axis - top) / tmax if tmax > 0 else 1.0

    out = _header(W, H)
    out.append('<g class="leaves" stroke="black">')
    for j in range(len(times)):
        y = axis - times[j] * tk
        w = 2 if tess.leaf_visible[j] else 0.5
        for c in range(tess.lengths.shape[1]):
            a = tess.positions[j] + tess.offsets[c]
            b = a + tess.lengths[j, c]
            a, b = max(a, 0.0), min(b, tess.n)
            if b < a:
                continue
            out.append(f'<line x1="{_num(a * k)}" y1="{_num(y)}" x2="{_num(b * k)}" y2="{_num(y)}" stroke-width="{w}"/>')
    out.append("</g>")
    out.append(f'<line class="axis" x1="0" y1="{_num(axis)}" x2="{_num(W)}" y2="{_num(axis)}" stroke="black" stroke-width="1"/>')
    out.append('<g class="eta" stroke="red" stroke-width="1">')
    for e in tess.eta:
        out.append(f'<line class="tick" x1="{_num(e * k)}" y1="{_num(axis - 6)}" x2="{_num(e * k)}" y2="{_num(axis + 6)}"/>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
