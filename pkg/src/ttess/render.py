"""Deterministic SVG snapshots: window, segments, cells, time axis.

Output is byte-reproducible: fixed 6-decimal coordinates, elements in a
fixed order (cells by area rank, then segments by line id, then overlays).
"""

from __future__ import annotations

import math

from .cells import extract_cells
from .geometry import EventTable
from .tessellation import Classification, Prototessellation, validate

_MARGIN = 0.08
_CANVAS = 640.0


def _fmt(value: float) -> str:
    out = f"{value:.6f}"
    return "0.000000" if out == "-0.000000" else out


class _Mapper:
    """World -> SVG user units, with the y axis flipped."""

    def __init__(self, vertices):
        xs = [x for x, _ in vertices]
        ys = [y for _, y in vertices]
        span = max(max(xs) - min(xs), max(ys) - min(ys))
        pad = _MARGIN * span
        self.x0 = min(xs) - pad
        self.y1 = max(ys) + pad
        self.scale = _CANVAS / (span + 2 * pad)
        self.width = (max(xs) - min(xs) + 2 * pad) * self.scale
        self.height = (max(ys) - min(ys) + 2 * pad) * self.scale

    def to_svg(self, p) -> tuple[float, float]:
        x, y = p
        return (x - self.x0) * self.scale, (self.y1 - y) * self.scale

    def point(self, p) -> tuple[str, str]:
        sx, sy = self.to_svg(p)
        return _fmt(sx), _fmt(sy)


def _cell_fill(rank: int, total: int) -> str:
    # light-to-dark gray by area rank; smallest cell lightest
    shade = 235 - (90 * rank) // max(1, total - 1) if total > 1 else 235
    return f"#{shade:02x}{shade:02x}{shade:02x}"


def render_svg(table: EventTable, tess: Prototessellation | None = None,
               cells=None) -> str:
    """Render the scene; cells are tinted by area rank when available."""
    window = table.window
    mapper = _Mapper(window.vertices)
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(mapper.width)}" '
        f'height="{_fmt(mapper.height)}" '
        f'viewBox="0 0 {_fmt(mapper.width)} {_fmt(mapper.height)}">',
    ]

    if tess is not None and cells is None:
        if validate(tess, table).classification is Classification.TTESS:
            cells = extract_cells(tess, table)
    if cells is not None:
        for rank, cell in enumerate(cells):
            pts = " ".join(",".join(mapper.point(p)) for p in cell.vertices)
            parts.append(
                f'<polygon points="{pts}" fill="{_cell_fill(rank, len(cells))}" '
                'stroke="none"/>'
            )

    outline = " ".join(",".join(mapper.point(p)) for p in window.vertices)
    parts.append(
        f'<polygon points="{outline}" fill="none" stroke="#202020" stroke-width="2"/>'
    )

    if tess is not None:
        for l in range(tess.k):
            x1, y1 = mapper.point(table.point_of(tess.births[l]))
            x2, y2 = mapper.point(table.point_of(tess.deaths[l]))
            parts.append(
                f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" '
                'stroke="#b03030" stroke-width="2"/>'
            )
    else:
        for line in table.lines:
            entry = table.point_of(table.entry_index[line.id])
            exit_ = table.point_of(table.exit_index[line.id])
            x1, y1 = mapper.point(entry)
            x2, y2 = mapper.point(exit_)
            parts.append(
                f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" '
                'stroke="#3050b0" stroke-width="1" stroke-dasharray="4,3"/>'
            )

    # Time axis arrow in the lower-left corner, pointing along increasing time.
    ux, uy = window.time_axis
    diam = window.diameter()
    base = (mapper.x0 + 0.05 * diam, mapper.y1 - 0.02 * diam)
    tip = (base[0] + 0.18 * diam * ux, base[1] + 0.18 * diam * uy)
    bx, by = mapper.to_svg(base)
    tx, ty = mapper.to_svg(tip)
    angle = math.atan2(ty - by, tx - bx)
    head = 8.0
    left = (tx - head * math.cos(angle - 0.4), ty - head * math.sin(angle - 0.4))
    right = (tx - head * math.cos(angle + 0.4), ty - head * math.sin(angle + 0.4))
    parts.append(
        f'<line x1="{_fmt(bx)}" y1="{_fmt(by)}" x2="{_fmt(tx)}" y2="{_fmt(ty)}" '
        'stroke="#106010" stroke-width="1.5"/>'
    )
    parts.append(
        f'<polygon points="{_fmt(tx)},{_fmt(ty)} {_fmt(left[0])},{_fmt(left[1])} '
        f'{_fmt(right[0])},{_fmt(right[1])}" fill="#106010"/>'
    )
    parts.append(
        f'<text x="{_fmt(tx)}" y="{_fmt(ty)}" dx="6" dy="-4" font-size="14" '
        'fill="#106010">time</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
