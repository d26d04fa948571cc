"""Static SVG rendering of pixelated graphs and cell covers (1024 x 1024, y up)."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence
from xml.sax.saxutils import quoteattr

from .pixel_graph import PixelGraph, rectangles
from .random_set import CellSet

SIZE = 1024
PALETTE = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"]


def _num(x: Fraction) -> str:
    v = float(x * SIZE)
    return str(int(v)) if v == int(v) else repr(v)


def _rect(x_lo, x_hi, y_lo, y_hi, attrs: str) -> str:
    return (
        f'<rect x="{_num(x_lo)}" y="{_num(1 - y_hi)}" '
        f'width="{_num(x_hi - x_lo)}" height="{_num(y_hi - y_lo)}" {attrs}/>'
    )


def render(graphs: Sequence[PixelGraph], overlay: CellSet | None = None) -> str:
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" '
        f'viewBox="0 0 {SIZE} {SIZE}">',
        f'<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="white" stroke="black" class="frame"/>',
    ]
    for i, g in enumerate(graphs):
        color = PALETTE[i % len(PALETTE)]
        lines.append(f'<g class="graph" id={quoteattr(f"graph-{i + 1}")} data-m="{g.m}" data-n="{g.n}">')
        for r in rectangles(g):
            lines.append("  " + _rect(r.x_lo, r.x_hi, r.y_lo, r.y_hi, f'fill="{color}" fill-opacity="0.5"'))
        lines.append("</g>")
    if overlay is not None:
        side = 1 << overlay.depth
        lines.append(f'<g class="cover" data-depth="{overlay.depth}">')
        for c, r in sorted(overlay.cells):
            lines.append(
                "  "
                + _rect(
                    Fraction(c - 1, side), Fraction(c, side), Fraction(r - 1, side), Fraction(r, side),
                    'fill="black" fill-opacity="0.35"',
                )
            )
        lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
