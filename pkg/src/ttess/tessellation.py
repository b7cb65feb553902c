"""Birth/death marks per line, the validity ladder, and the two trees.

A tessellation on k fixed lines is stored as two tuples of event ranks,
``births[l]`` and ``deaths[l]`` for line ids 0..k-1. The border is a
pseudo-line with id -1 whose marks are fixed: born at the sentinel rank
before every event, dead at the sentinel rank after every event
(``table.one_mark``). Lines may carry the One sentinel mid-algorithm
("not yet born/killed"); a finished T-tessellation has event marks only.

The validity ladder: any mark pair is a prototessellation; segments that
never cross nor share endpoints form a pretessellation; if additionally
every non-border birth and death lies strictly inside the supporting
segment (all interior vertices T-shaped) it is a T-tessellation.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from enum import Enum

from .errors import InvalidTessellation, MalformedMarks
from .geometry import BORDER, EventKind, EventTable


@dataclass(frozen=True)
class Prototessellation:
    births: tuple[int, ...]
    deaths: tuple[int, ...]

    @property
    def k(self) -> int:
        return len(self.births)

    def marks(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return self.births, self.deaths


@dataclass(frozen=True)
class Pretessellation(Prototessellation):
    """Refinement tag: claims the no-cross condition holds."""


@dataclass(frozen=True)
class TTessellation(Pretessellation):
    """Refinement tag: claims all interior vertices are T-shaped."""


class Classification(Enum):
    PROTO = "proto"
    PRE = "pre"
    TTESS = "ttess"


# Clause names used in validation reports.
CLAUSE_MARK_ORDER = "mark-order"              # birth not strictly before death
CLAUSE_SEGMENTS_CROSS = "segments-cross"      # two segments strictly cross
CLAUSE_SHARED_BIRTH = "shared-birth"          # two segments born at one event
CLAUSE_BIRTH_ON_DEATH = "birth-on-death"      # one born where the other dies
CLAUSE_SHARED_DEATH = "shared-death"          # two segments die at one event
CLAUSE_BIRTH_OUTSIDE_PARENT = "birth-outside-parent"
CLAUSE_DEATH_OUTSIDE_KILLER = "death-outside-killer"
CLAUSE_MISSING_SEGMENT = "missing-segment"    # line never born or never killed

_PRE_CLAUSES = {
    CLAUSE_SEGMENTS_CROSS,
    CLAUSE_SHARED_BIRTH,
    CLAUSE_BIRTH_ON_DEATH,
    CLAUSE_SHARED_DEATH,
}
_TTESS_CLAUSES = {
    CLAUSE_BIRTH_OUTSIDE_PARENT,
    CLAUSE_DEATH_OUTSIDE_KILLER,
    CLAUSE_MISSING_SEGMENT,
}


@dataclass(frozen=True)
class Violation:
    clause: str
    lines: tuple[int, ...]
    event: int | None = None


@dataclass(frozen=True)
class ValidationReport:
    classification: Classification
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return self.classification is Classification.TTESS

    def clauses(self) -> set[str]:
        return {v.clause for v in self.violations}


def _check_marks_wellformed(proto: Prototessellation, table: EventTable) -> None:
    one = table.one_mark
    if len(proto.births) != table.k or len(proto.deaths) != table.k:
        raise MalformedMarks(
            f"expected marks for {table.k} lines, got "
            f"{len(proto.births)} births / {len(proto.deaths)} deaths"
        )
    for line_id in range(table.k):
        for mark in (proto.births[line_id], proto.deaths[line_id]):
            if mark == one:
                continue
            if not (0 <= mark < one) or not table.on_line(mark, line_id):
                raise MalformedMarks(
                    f"mark {mark} of line {line_id} is not an event on that line"
                )


def validate(proto: Prototessellation, table: EventTable) -> ValidationReport:
    """Classify a mark pair as Proto / Pre / TTess, reporting violated clauses.

    The strongest class whose invariants all hold is returned; anything that
    fails the no-cross condition (or basic mark ordering) reports as Proto,
    the weakest rung. Marks referencing events off their line raise
    MalformedMarks instead of classifying.
    """
    _check_marks_wellformed(proto, table)
    one = table.one_mark
    births, deaths = proto.births, proto.deaths
    violations: list[Violation] = []

    def birth(l: int) -> int:
        return -1 if l == BORDER else births[l]

    def death(l: int) -> int:
        return one if l == BORDER else deaths[l]

    for l in range(table.k):
        if births[l] < one and deaths[l] < one and births[l] >= deaths[l]:
            violations.append(
                Violation(CLAUSE_MARK_ORDER, (l,), deaths[l])
            )

    # No-cross condition, pairwise at each crossing event.
    for event in table.events:
        if event.kind is not EventKind.CROSSING:
            continue
        e = event.index
        l, m = event.lines
        if birth(l) < e < death(l) and birth(m) < e < death(m):
            violations.append(Violation(CLAUSE_SEGMENTS_CROSS, (l, m), e))
        if births[l] == e and births[m] == e:
            violations.append(Violation(CLAUSE_SHARED_BIRTH, (l, m), e))
        if births[l] == e and deaths[m] == e:
            violations.append(Violation(CLAUSE_BIRTH_ON_DEATH, (l, m), e))
        if deaths[l] == e and births[m] == e:
            violations.append(Violation(CLAUSE_BIRTH_ON_DEATH, (m, l), e))
        if deaths[l] == e and deaths[m] == e:
            violations.append(Violation(CLAUSE_SHARED_DEATH, (l, m), e))

    # T-shape: every mark at a crossing sits strictly inside the other segment.
    for l in range(table.k):
        if births[l] == one or deaths[l] == one:
            violations.append(Violation(CLAUSE_MISSING_SEGMENT, (l,)))
        for mark, clause in (
            (births[l], CLAUSE_BIRTH_OUTSIDE_PARENT),
            (deaths[l], CLAUSE_DEATH_OUTSIDE_KILLER),
        ):
            if mark == one or table.kind_of(mark) is not EventKind.CROSSING:
                continue
            m = table.other_line(mark, l)
            if not (birth(m) < mark < death(m)):
                violations.append(Violation(clause, (l, m), mark))

    clauses = {v.clause for v in violations}
    if clauses - _PRE_CLAUSES - _TTESS_CLAUSES:
        classification = Classification.PROTO
    elif clauses & _PRE_CLAUSES:
        classification = Classification.PROTO
    elif clauses & _TTESS_CLAUSES:
        classification = Classification.PRE
    else:
        classification = Classification.TTESS
    return ValidationReport(classification, tuple(violations))


def require_ttessellation(proto: Prototessellation, table: EventTable) -> TTessellation:
    report = validate(proto, table)
    if not report.ok:
        raise InvalidTessellation(
            f"not a T-tessellation: {sorted(report.clauses())}"
        )
    return TTessellation(proto.births, proto.deaths)


@dataclass(frozen=True)
class BirthTree:
    """Parent/child structure rooted at the border (also used for deaths).

    ``parent[l]`` is the line supporting l's birth (BORDER for border
    births); ``children[x]`` lists x's children in birth-time order;
    ``generation[x]`` is the depth below the border root.
    """

    parent: dict
    children: dict
    generation: dict

    @property
    def leaves(self) -> frozenset:
        return frozenset(
            l for l in self.parent if not self.children.get(l)
        )

    @property
    def interior(self) -> frozenset:
        return frozenset(
            l for l in self.parent if self.children.get(l)
        )


def _tree_from_marks(marks: tuple[int, ...], table: EventTable) -> BirthTree:
    parent: dict[int, int] = {}
    children: dict[int, list[int]] = {BORDER: []}
    for l in range(table.k):
        mark = marks[l]
        if table.kind_of(mark) is EventKind.CROSSING:
            parent[l] = table.other_line(mark, l)
        else:
            parent[l] = BORDER
        children.setdefault(l, [])
        children.setdefault(parent[l], []).append(l)
    for node in children:
        children[node].sort(key=lambda c: marks[c])

    generation = {BORDER: 0}
    queue = deque([BORDER])
    while queue:
        node = queue.popleft()
        for child in children[node]:
            generation[child] = generation[node] + 1
            queue.append(child)
    if len(generation) != table.k + 1:
        raise InvalidTessellation("parent relation does not form a tree")
    return BirthTree(
        parent=parent,
        children={node: tuple(kids) for node, kids in children.items()},
        generation=generation,
    )


def birth_tree(tess: Prototessellation, table: EventTable) -> BirthTree:
    """Tree of births: parent = line supporting each birth, rooted at the border."""
    return _tree_from_marks(tess.births, table)


def death_tree(tess: Prototessellation, table: EventTable) -> BirthTree:
    """Tree of deaths: parent = killer of each line, rooted at the border."""
    return _tree_from_marks(tess.deaths, table)


def marks_from_trees(births_tree: BirthTree, deaths_tree: BirthTree,
                     table: EventTable) -> Prototessellation:
    """Inverse of the tree constructions: recover the mark pair."""
    births = []
    deaths = []
    for l in range(table.k):
        bparent = births_tree.parent[l]
        births.append(
            table.entry_index[l] if bparent == BORDER else table.crossing(l, bparent)
        )
        dparent = deaths_tree.parent[l]
        deaths.append(
            table.exit_index[l] if dparent == BORDER else table.crossing(l, dparent)
        )
    return Prototessellation(tuple(births), tuple(deaths))


def murder_counts(tess: Prototessellation, table: EventTable) -> dict:
    """Number of segments dying on each line; the border's count is infinite."""
    counts = {l: 0 for l in range(table.k)}
    counts[BORDER] = math.inf
    for m in range(table.k):
        mark = tess.deaths[m]
        if mark < table.one_mark and table.kind_of(mark) is EventKind.CROSSING:
            counts[table.other_line(mark, m)] += 1
    return counts


def other_children_counts(tess: Prototessellation, table: EventTable,
                          orphans) -> dict:
    """Number of orphan segments born on each line (border included)."""
    counts = {l: 0 for l in range(table.k)}
    counts[BORDER] = 0
    for m in orphans:
        mark = tess.births[m]
        if mark < table.one_mark:
            if table.kind_of(mark) is EventKind.CROSSING:
                counts[table.other_line(mark, m)] += 1
            else:
                counts[BORDER] += 1
    return counts
