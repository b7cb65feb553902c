"""Cell (face) extraction from a validated T-tessellation.

Segments never cross, so the subdivision's vertices are exactly the mark
events plus the window corners. Each segment is split at the events where
another segment's endpoint touches it, the window border is split at the
border marks, and faces are traced through the resulting planar graph by
walking to the next edge clockwise around every node. Bounded faces come
out counter-clockwise; the single clockwise cycle is the outside and is
dropped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidTessellation
from .geometry import EventKind, EventTable, Point
from .tessellation import Classification, Prototessellation, validate

AREA_RTOL = 1e-9


@dataclass(frozen=True)
class Cell:
    vertices: tuple[Point, ...]
    area: float

    def centroid(self) -> Point:
        xs = sum(x for x, _ in self.vertices) / len(self.vertices)
        ys = sum(y for _, y in self.vertices) / len(self.vertices)
        return (xs, ys)


def _polygon_area(points) -> float:
    total = 0.0
    n = len(points)
    for i in range(n):
        x1, y1 = points[i]
        x2, y2 = points[(i + 1) % n]
        total += x1 * y2 - x2 * y1
    return total / 2.0


def _boundary_nodes(tess, table):
    """Window corners plus border marks, ordered along the CCW boundary."""
    window = table.window
    used_border: list[tuple[int, Point]] = []
    for l in range(table.k):
        for mark in (tess.births[l], tess.deaths[l]):
            if table.kind_of(mark) is not EventKind.CROSSING:
                used_border.append((mark, table.point_of(mark)))

    verts = window.vertices
    n = len(verts)
    ordered: list[tuple] = []
    for i in range(n):
        ax, ay = verts[i]
        bx, by = verts[(i + 1) % n]
        ex, ey = bx - ax, by - ay
        length2 = ex * ex + ey * ey
        ordered.append((("w", i), verts[i]))
        on_edge = []
        for idx, (px, py) in used_border:
            t = ((px - ax) * ex + (py - ay) * ey) / length2
            dist = abs(ex * (py - ay) - ey * (px - ax)) / math.sqrt(length2)
            if -1e-9 < t < 1.0 + 1e-9 and dist <= 1e-9 * window.diameter() + 1e-12:
                on_edge.append((t, ("e", idx), (px, py)))
        on_edge.sort()
        ordered.extend((node, pt) for _, node, pt in on_edge)
    return ordered


def extract_cells(tess: Prototessellation, table: EventTable) -> list[Cell]:
    """Split the window into the tessellation's cells (k segments -> k+1 cells).

    The input must validate as a T-tessellation. Cells are returned sorted
    by area then centroid, so the order is reproducible.
    """
    report = validate(tess, table)
    if report.classification is not Classification.TTESS:
        raise InvalidTessellation(
            f"cell extraction needs a T-tessellation, got {report.classification.value}"
        )

    coords: dict = {}
    edges: set[tuple] = set()

    def add_edge(u, pu, v, pv):
        coords[u] = pu
        coords[v] = pv
        edges.add((u, v))
        edges.add((v, u))

    # Window boundary, split at border marks.
    boundary = _boundary_nodes(tess, table)
    for (u, pu), (v, pv) in zip(boundary, boundary[1:] + boundary[:1]):
        add_edge(u, pu, v, pv)

    # Segments, split where other segments' endpoints touch them.
    marks_used = [set() for _ in range(table.k)]
    for m in range(table.k):
        for mark in (tess.births[m], tess.deaths[m]):
            if table.kind_of(mark) is EventKind.CROSSING:
                marks_used[table.other_line(mark, m)].add(mark)
    for l in range(table.k):
        birth, death = tess.births[l], tess.deaths[l]
        stops = [birth]
        stops += sorted(e for e in marks_used[l] if birth < e < death)
        stops.append(death)
        for u_idx, v_idx in zip(stops, stops[1:]):
            add_edge(
                ("e", u_idx), table.point_of(u_idx),
                ("e", v_idx), table.point_of(v_idx),
            )

    # Outgoing edges per node, by angle; faces by clockwise-next traversal.
    outgoing: dict = {}
    for u, v in edges:
        ux, uy = coords[u]
        vx, vy = coords[v]
        outgoing.setdefault(u, []).append((math.atan2(vy - uy, vx - ux), v))
    for u in outgoing:
        outgoing[u].sort()

    next_around: dict = {}
    for u, neighbours in outgoing.items():
        for i, (_, v) in enumerate(neighbours):
            # Arriving v -> u continues along the next edge clockwise at u.
            next_around[(v, u)] = (u, neighbours[i - 1][1])

    cells = []
    seen: set[tuple] = set()
    for start in sorted(edges):
        if start in seen:
            continue
        cycle = []
        he = start
        while he not in seen:
            seen.add(he)
            cycle.append(he[0])
            he = next_around[he]
        points = tuple(coords[node] for node in cycle)
        area = _polygon_area(points)
        if area > 0:
            cells.append(Cell(points, area))

    if len(cells) != table.k + 1:
        raise InvalidTessellation(
            f"expected {table.k + 1} cells, traced {len(cells)}"
        )
    total = sum(c.area for c in cells)
    window_area = table.window.area()
    if abs(total - window_area) > AREA_RTOL * window_area:
        raise InvalidTessellation(
            f"cell areas sum to {total}, window area is {window_area}"
        )
    cells.sort(key=lambda c: (c.area, c.centroid()))
    return cells
