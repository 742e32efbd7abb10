"""Deterministic SVG rendering of timed string diagrams.

Time flows left to right (one column per time unit); resources run as
horizontal wires.  Generator boxes span their duration, waits are plain
wire stretches with a tick, braids are wire crossings at their zero-width
column.  Identical input and spec produce byte-identical SVG.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .pinwheel import PinwheelCell, SkewCellError, duration
from .tiling import WAIT, Tiling


@dataclass(frozen=True)
class RenderSpec:
    col_width: int = 48
    lane_height: int = 28
    margin: int = 16
    font_size: int = 12
    wire_color: str = "#333333"
    box_fill: str = "#f3e8d2"
    box_stroke: str = "#7a5c2e"

    def __post_init__(self):
        if self.col_width <= 0 or self.lane_height <= 0 or self.font_size <= 0:
            raise ValueError("render dimensions must be positive")


def _fmt(value) -> str:
    f = Fraction(value)
    if f.denominator == 1:
        return str(f.numerator)
    out = float(f)
    return f"{out:.2f}".rstrip("0").rstrip(".")


def render_svg(target, spec: RenderSpec = RenderSpec()) -> str:
    """Render a wired tiling or a pinwheel cell to SVG 1.1 text."""
    if isinstance(target, PinwheelCell):
        from .network import network_from_term, scheduled_tiling
        from .tiling import scale_to_integer_lanes

        duration(target)  # reject skew cells
        net = network_from_term(target.body)
        target = scale_to_integer_lanes(scheduled_tiling(net, len(target.h)))
    if not isinstance(target, Tiling):
        raise TypeError("render_svg expects a tiling or a pinwheel cell")
    t = target
    if t.wires is None and t.tiles:
        raise SkewCellError("tiling must be validated (wires present) before rendering")
    if Fraction(t.height).denominator != 1:
        raise ValueError("tiling lanes must be integers; scale it first")

    cw, lh, m = spec.col_width, spec.lane_height, spec.margin
    width = m * 2 + t.width * cw
    height = m * 2 + int(Fraction(t.height)) * lh

    def xv(col) -> Fraction:
        return m + Fraction(col) * cw

    def yv(lane) -> Fraction:
        return m + Fraction(lane) * lh

    def line(x1, y1, x2, y2, sw="1.5"):
        return (
            f'<line x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" y2="{_fmt(y2)}" '
            f'stroke="{spec.wire_color}" stroke-width="{sw}"/>'
        )

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
    ]

    for tile in sorted(t.tiles, key=lambda tl: (Fraction(tl.y0), tl.x0, tl.name)):
        cy = yv((Fraction(tile.y0) + Fraction(tile.y1)) / 2)
        if tile.gen == WAIT:
            # Waits are plain wire stretches with a tick mark.
            parts.append(line(xv(tile.x0), cy, xv(tile.x1), cy))
            tick = xv(Fraction(tile.x0 + tile.x1, 2))
            parts.append(line(tick, cy - 4, tick, cy + 4, sw="1"))
        else:
            w_px = (tile.x1 - tile.x0) * cw if tile.x1 > tile.x0 else 2
            parts.append(
                f'<rect x="{_fmt(xv(tile.x0))}" y="{_fmt(yv(tile.y0))}" width="{_fmt(w_px)}" '
                f'height="{_fmt((Fraction(tile.y1) - Fraction(tile.y0)) * lh)}" '
                f'fill="{spec.box_fill}" stroke="{spec.box_stroke}" stroke-width="1.5" rx="4"/>'
            )
            cx = xv(Fraction(tile.x0 + tile.x1, 2))
            parts.append(
                f'<text x="{_fmt(cx)}" y="{_fmt(cy + Fraction(spec.font_size, 3))}" '
                f'font-family="sans-serif" font-size="{spec.font_size}" text-anchor="middle" '
                f'fill="#1a1a1a">{tile.gen}</text>'
            )

    # Boundary stubs so open wires are visible at the west and east edges.
    for w in sorted(t.wires or (), key=lambda w: (Fraction(w.y0), w.col, w.wid)):
        cy = yv((Fraction(w.y0) + Fraction(w.y1)) / 2)
        if w.src[0] == "W":
            parts.append(line(m - 8, cy, xv(0), cy))
        if w.dst[0] == "E":
            parts.append(line(xv(t.width), cy, xv(t.width) + 8, cy))

    # Braids: crossings drawn in a narrow zone around their column.
    for idx, b in enumerate(t.braids):
        ins = sorted(
            (w for w in t.wires or () if w.dst[0] == "braid" and w.dst[1] == idx),
            key=lambda w: w.dst[2],
        )
        outs = sorted(
            (w for w in t.wires or () if w.src[0] == "braid" and w.src[1] == idx),
            key=lambda w: w.src[2],
        )
        if len(ins) == 2 and len(outs) == 2:
            spread = Fraction(1, 3)
            for win, wout in ((ins[0], outs[1]), (ins[1], outs[0])):
                y_in = yv((Fraction(win.y0) + Fraction(win.y1)) / 2)
                y_out = yv((Fraction(wout.y0) + Fraction(wout.y1)) / 2)
                parts.append(line(xv(Fraction(b.col) - spread), y_in, xv(Fraction(b.col) + spread), y_out))

    parts.append("</svg>")
    return "\n".join(parts) + "\n"
