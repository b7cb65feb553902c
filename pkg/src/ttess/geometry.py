"""Lines hitting a convex window, the ordered event table, and line sampling.

Everything downstream works on *events*: the crossing points of the lines
with each other (strictly inside the window) and with the window border.
A time axis is an oriented direction along which all events have pairwise
distinct coordinates; once fixed, events are identified by their rank in
time order and all later algorithms compare integer ranks only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DegenerateConfiguration

BORDER = -1           # pseudo-line id for the window border
ZERO_MARK = -1        # rank sentinel ordered before every event
BAND_MARGIN = 1e-3    # window projection is mapped into (BAND_MARGIN, 1 - BAND_MARGIN)
TOLERANCE_FACTOR = 1e-9   # degeneracy tolerance = factor * window diameter
AXIS_BUDGET = 64      # candidate axes tried before giving up

Point = tuple[float, float]


@dataclass(frozen=True)
class Line:
    """An infinite line, parametrised by its normal angle and signed distance.

    ``alpha`` is the angle in [0, pi) of the normal direction; ``p`` is the
    signed distance from the origin, so the line is {x : x . n(alpha) = p}.
    """

    id: int
    alpha: float
    p: float

    def normal(self) -> Point:
        return (math.cos(self.alpha), math.sin(self.alpha))

    def direction(self) -> Point:
        return (-math.sin(self.alpha), math.cos(self.alpha))

    def base_point(self) -> Point:
        return (self.p * math.cos(self.alpha), self.p * math.sin(self.alpha))

    def point_at(self, t: float) -> Point:
        bx, by = self.base_point()
        dx, dy = self.direction()
        return (bx + t * dx, by + t * dy)


def horizontal_line(line_id: int, y: float) -> Line:
    return Line(line_id, math.pi / 2.0, y)


def vertical_line(line_id: int, x: float) -> Line:
    return Line(line_id, 0.0, x)


def line_intersection(a: Line, b: Line) -> Point | None:
    """Crossing point of two lines, or None when (nearly) parallel."""
    det = math.sin(b.alpha - a.alpha)
    if abs(det) < 1e-12:
        return None
    ca, sa = math.cos(a.alpha), math.sin(a.alpha)
    cb, sb = math.cos(b.alpha), math.sin(b.alpha)
    x = (a.p * sb - b.p * sa) / det
    y = (b.p * ca - a.p * cb) / det
    return (x, y)


def _polygon_ccw(vertices: tuple[Point, ...]) -> tuple[Point, ...]:
    area2 = 0.0
    n = len(vertices)
    for i in range(n):
        x1, y1 = vertices[i]
        x2, y2 = vertices[(i + 1) % n]
        area2 += x1 * y2 - x2 * y1
    return vertices if area2 > 0 else tuple(reversed(vertices))


def _check_strictly_convex(vertices: tuple[Point, ...]) -> None:
    n = len(vertices)
    if n < 3:
        raise ValueError("window polygon needs at least 3 vertices")
    for i in range(n):
        ax, ay = vertices[i]
        bx, by = vertices[(i + 1) % n]
        cx, cy = vertices[(i + 2) % n]
        cross = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
        if cross <= 0:
            raise ValueError("window polygon is not strictly convex (CCW)")


@dataclass(frozen=True)
class Window:
    """Strictly convex polygon with a fixed time axis.

    The affine map ``t -> t * time_scale + time_offset`` places the window's
    projection onto the axis inside (BAND_MARGIN, 1 - BAND_MARGIN), so the
    sentinels 0 ("always alive" start) and 1 (maximum) lie outside it.
    """

    vertices: tuple[Point, ...]
    time_axis: Point
    time_offset: float
    time_scale: float

    @staticmethod
    def with_axis(vertices, axis) -> "Window":
        verts = _polygon_ccw(tuple((float(x), float(y)) for x, y in vertices))
        _check_strictly_convex(verts)
        ux, uy = axis
        norm = math.hypot(ux, uy)
        ux, uy = ux / norm, uy / norm
        raw = [vx * ux + vy * uy for vx, vy in verts]
        lo, hi = min(raw), max(raw)
        if hi - lo <= 0:
            raise DegenerateConfiguration("window projects to a point on the axis")
        scale = (1.0 - 2.0 * BAND_MARGIN) / (hi - lo)
        offset = BAND_MARGIN - lo * scale
        return Window(verts, (ux, uy), offset, scale)

    def time_of(self, point: Point) -> float:
        ux, uy = self.time_axis
        return (point[0] * ux + point[1] * uy) * self.time_scale + self.time_offset

    def raw_projection(self, point: Point) -> float:
        ux, uy = self.time_axis
        return point[0] * ux + point[1] * uy

    def diameter(self) -> float:
        verts = self.vertices
        return max(
            math.dist(verts[i], verts[j])
            for i in range(len(verts))
            for j in range(i + 1, len(verts))
        )

    def area(self) -> float:
        total = 0.0
        n = len(self.vertices)
        for i in range(n):
            x1, y1 = self.vertices[i]
            x2, y2 = self.vertices[(i + 1) % n]
            total += x1 * y2 - x2 * y1
        return total / 2.0

    def tolerance(self) -> float:
        return TOLERANCE_FACTOR * self.diameter()

    def contains_strict(self, point: Point, margin: float | None = None) -> bool:
        m = self.tolerance() if margin is None else margin
        n = len(self.vertices)
        px, py = point
        for i in range(n):
            ax, ay = self.vertices[i]
            bx, by = self.vertices[(i + 1) % n]
            ex, ey = bx - ax, by - ay
            cross = ex * (py - ay) - ey * (px - ax)
            if cross <= m * math.hypot(ex, ey):
                return False
        return True


def unit_square() -> tuple[Point, ...]:
    return ((0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0))


def _chord(line: Line, vertices: tuple[Point, ...]) -> tuple[Point, Point] | None:
    """Clip the line against the convex polygon; None when the chord is empty."""
    bx, by = line.base_point()
    dx, dy = line.direction()
    tmin, tmax = -math.inf, math.inf
    n = len(vertices)
    for i in range(n):
        ax, ay = vertices[i]
        qx, qy = vertices[(i + 1) % n]
        ex, ey = qx - ax, qy - ay
        # inside: cross(edge, x - a) >= 0  ->  c0 + t*c1 >= 0
        c0 = ex * (by - ay) - ey * (bx - ax)
        c1 = ex * dy - ey * dx
        if abs(c1) < 1e-15:
            if c0 < 0:
                return None
            continue
        bound = -c0 / c1
        if c1 > 0:
            tmin = max(tmin, bound)
        else:
            tmax = min(tmax, bound)
    if not (tmax > tmin) or math.isinf(tmin) or math.isinf(tmax):
        return None
    return line.point_at(tmin), line.point_at(tmax)


def _candidate_event_points(lines, vertices, tol) -> tuple[list, list]:
    """Axis-independent event geometry: border points per line, crossings per pair."""
    border: list[tuple[Point, Point]] = []
    for line in lines:
        chord = _chord(line, vertices)
        if chord is None or math.dist(*chord) <= tol:
            raise DegenerateConfiguration(
                f"line {line.id} has no chord of positive length in the window"
            )
        border.append(chord)
    probe = Window.with_axis(vertices, (1.0, 0.0))
    crossings: list[tuple[int, int, Point]] = []
    for i, a in enumerate(lines):
        for b in lines[i + 1:]:
            pt = line_intersection(a, b)
            if pt is not None and probe.contains_strict(pt, tol):
                crossings.append((a.id, b.id, pt))
    return border, crossings


def choose_time_axis(lines, vertices, seed: int, budget: int = AXIS_BUDGET) -> Window:
    """Pick a time axis under which all candidate events project apart.

    Candidate directions come from a seeded generator; the first admissible
    one is kept, so the result is reproducible. Raises DegenerateConfiguration
    when the budget runs out (coincident lines, concurrent triples, ...).
    """
    verts = _polygon_ccw(tuple((float(x), float(y)) for x, y in vertices))
    _check_strictly_convex(verts)
    diameter = max(
        math.dist(verts[i], verts[j])
        for i in range(len(verts))
        for j in range(i + 1, len(verts))
    )
    tol = TOLERANCE_FACTOR * diameter
    lines = sorted(lines, key=lambda l: l.id)
    border, crossings = _candidate_event_points(lines, verts, tol)

    points: list[Point] = []
    for p_in, p_out in border:
        points.extend((p_in, p_out))
    points.extend(pt for _, _, pt in crossings)

    rng = np.random.default_rng(seed)
    for _ in range(budget):
        theta = float(rng.uniform(0.0, math.pi))
        ux, uy = math.cos(theta), math.sin(theta)
        if any(
            abs(line.direction()[0] * ux + line.direction()[1] * uy) < 1e-9
            for line in lines
        ):
            continue
        proj = sorted(px * ux + py * uy for px, py in points)
        if all(b - a > tol for a, b in zip(proj, proj[1:])):
            return Window.with_axis(verts, (ux, uy))
    raise DegenerateConfiguration(
        f"no admissible time axis found in {budget} tries "
        "(coincident lines or shared crossing points?)"
    )


class EventKind(Enum):
    CROSSING = "crossing"
    BORDER_ENTRY = "border_entry"
    BORDER_EXIT = "border_exit"


@dataclass(frozen=True)
class Event:
    """One candidate segment endpoint, identified by its rank in time order."""

    index: int
    time: float
    kind: EventKind
    lines: tuple[int, int]    # crossing: (a, b) with a < b; border: (line, BORDER)
    point: Point


@dataclass(frozen=True)
class EventTable:
    """All events on a line set, totally ordered along the window's time axis."""

    window: Window
    lines: tuple[Line, ...]
    events: tuple[Event, ...]
    per_line: tuple[tuple[int, ...], ...]
    crossing_index: dict = field(repr=False)
    entry_index: dict = field(repr=False)
    exit_index: dict = field(repr=False)

    @property
    def k(self) -> int:
        return len(self.lines)

    @property
    def n_events(self) -> int:
        return len(self.events)

    @property
    def one_mark(self) -> int:
        """Rank sentinel ordered after every event (the 'maximum' mark)."""
        return len(self.events)

    def lines_of(self, index: int) -> tuple[int, int]:
        return self.events[index].lines

    def kind_of(self, index: int) -> EventKind:
        return self.events[index].kind

    def point_of(self, index: int) -> Point:
        return self.events[index].point

    def crossing(self, a: int, b: int) -> int | None:
        return self.crossing_index.get((min(a, b), max(a, b)))

    def on_line(self, index: int, line_id: int) -> bool:
        return line_id in self.events[index].lines

    def other_line(self, index: int, line_id: int) -> int:
        a, b = self.events[index].lines
        return b if a == line_id else a


def build_event_table(lines, window: Window) -> EventTable:
    """Compute, order and index every event of the line set in the window."""
    lines = tuple(sorted(lines, key=lambda l: l.id))
    if [l.id for l in lines] != list(range(len(lines))):
        raise ValueError("line ids must be dense and 0-based")
    tol = window.tolerance()
    border, crossings = _candidate_event_points(lines, window.vertices, tol)

    raw: list[tuple[float, EventKind, tuple[int, int], Point]] = []
    for line, (p_first, p_second) in zip(lines, border):
        t1 = window.raw_projection(p_first)
        t2 = window.raw_projection(p_second)
        (t_in, pt_in), (t_out, pt_out) = sorted([(t1, p_first), (t2, p_second)])
        raw.append((t_in, EventKind.BORDER_ENTRY, (line.id, BORDER), pt_in))
        raw.append((t_out, EventKind.BORDER_EXIT, (line.id, BORDER), pt_out))
    for a, b, pt in crossings:
        raw.append((window.raw_projection(pt), EventKind.CROSSING, (a, b), pt))

    raw.sort(key=lambda item: item[0])
    for (ta, *_), (tb, *_) in zip(raw, raw[1:]):
        if tb - ta <= tol:
            raise DegenerateConfiguration(
                f"two event times collide within tolerance ({ta!r} vs {tb!r})"
            )

    events = []
    per_line: list[list[int]] = [[] for _ in lines]
    crossing_index: dict[tuple[int, int], int] = {}
    entry_index: dict[int, int] = {}
    exit_index: dict[int, int] = {}
    for idx, (t_raw, kind, involved, pt) in enumerate(raw):
        time = t_raw * window.time_scale + window.time_offset
        events.append(Event(idx, time, kind, involved, pt))
        if kind is EventKind.CROSSING:
            per_line[involved[0]].append(idx)
            per_line[involved[1]].append(idx)
            crossing_index[involved] = idx
        else:
            per_line[involved[0]].append(idx)
            if kind is EventKind.BORDER_ENTRY:
                entry_index[involved[0]] = idx
            else:
                exit_index[involved[0]] = idx

    for line in lines:
        seq = per_line[line.id]
        if seq[0] != entry_index[line.id] or seq[-1] != exit_index[line.id]:
            raise DegenerateConfiguration(
                f"line {line.id}: border events do not bracket its crossings"
            )

    assert len(events) == len(crossings) + 2 * len(lines)
    return EventTable(
        window=window,
        lines=lines,
        events=tuple(events),
        per_line=tuple(tuple(seq) for seq in per_line),
        crossing_index=crossing_index,
        entry_index=entry_index,
        exit_index=exit_index,
    )


def build_scene(lines, vertices, seed: int) -> tuple[Window, EventTable]:
    """Convenience: pick an admissible axis, then build the event table."""
    window = choose_time_axis(lines, vertices, seed)
    return window, build_event_table(lines, window)


def _rejection_line(line_id: int, vertices, radius: float, tol: float, rng) -> Line:
    while True:
        alpha = float(rng.uniform(0.0, math.pi))
        p = float(rng.uniform(-radius, radius))
        line = Line(line_id, alpha, p)
        chord = _chord(line, vertices)
        if chord is not None and math.dist(*chord) > tol:
            return line


def _sampling_setup(vertices):
    verts = tuple((float(x), float(y)) for x, y in vertices)
    radius = max(math.hypot(x, y) for x, y in verts)
    diameter = max(
        math.dist(verts[i], verts[j])
        for i in range(len(verts))
        for j in range(i + 1, len(verts))
    )
    return verts, radius, TOLERANCE_FACTOR * diameter


def sample_poisson_lines(tau: float, vertices, seed) -> list[Line]:
    """Draw a Poisson(tau) number of i.i.d. uniform lines hitting the window.

    Uniformity on the set of hitting lines is realised by rejection from the
    box [0, pi) x [-R, R], R being the window circumradius about the origin.
    Deterministic given the seed; an empty sample (k = 0) is a valid outcome.
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    verts, radius, tol = _sampling_setup(vertices)
    rng = np.random.default_rng(seed)
    k = int(rng.poisson(tau))
    return [_rejection_line(i, verts, radius, tol, rng) for i in range(k)]


def sample_uniform_lines(k: int, vertices, seed) -> list[Line]:
    """Draw exactly k i.i.d. uniform lines hitting the window."""
    verts, radius, tol = _sampling_setup(vertices)
    rng = np.random.default_rng(seed)
    return [_rejection_line(i, verts, radius, tol, rng) for i in range(k)]
