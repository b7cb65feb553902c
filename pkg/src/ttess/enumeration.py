"""Exhaustive enumeration of T-tessellations on a fixed line set.

A branching sweep walks the events in time order, maintaining each line's
status (unborn / alive / dead). Border entries and crossings with exactly
one alive line branch on "born here" vs "not"; crossings with two alive
lines branch on which one dies (exactly one must); a border exit kills an
alive line and prunes a branch whose line never got born. Every leaf of
the branch tree is a T-tessellation and every T-tessellation on the lines
is reached by exactly one path.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import BudgetExceeded
from .geometry import (
    EventKind,
    Line,
    build_event_table,
    choose_time_axis,
    horizontal_line,
    sample_uniform_lines,
    unit_square,
    vertical_line,
)
from .tessellation import TTessellation

DEFAULT_BUDGET = 10_000_000

_UNBORN = -2


def enumerate_all(table, budget: int = DEFAULT_BUDGET) -> list[TTessellation]:
    """All T-tessellations on the table's lines, in canonical mark order.

    Raises BudgetExceeded once more than ``budget`` branch nodes have been
    expanded; the offending line set travels with the exception.
    """
    k = table.k
    one = table.one_mark
    results: list[tuple[tuple[int, ...], tuple[int, ...]]] = []
    # Stack entries: (cursor, births, deaths); births use _UNBORN until set,
    # deaths use the One sentinel while the line is alive or unborn.
    stack = [(0, [_UNBORN] * k, [one] * k)]
    nodes = 0
    while stack:
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded(
                f"enumeration exceeded {budget} nodes", lines=table.lines
            )
        cursor, births, deaths = stack.pop()
        pruned = False
        while cursor < one:
            e = cursor
            a, b = table.lines_of(e)
            kind = table.kind_of(e)
            cursor += 1
            if kind is EventKind.BORDER_ENTRY:
                if births[a] == _UNBORN:
                    skip_births = births.copy()
                    stack.append((cursor, skip_births, deaths.copy()))
                    births[a] = e     # "born here" explored first
            elif kind is EventKind.BORDER_EXIT:
                if births[a] == _UNBORN:
                    pruned = True     # the line would support no segment
                    break
                if deaths[a] == one:
                    deaths[a] = e     # forced kill by the border
            else:
                alive_a = births[a] != _UNBORN and deaths[a] == one
                alive_b = births[b] != _UNBORN and deaths[b] == one
                if alive_a and alive_b:
                    other = deaths.copy()
                    other[b] = e
                    stack.append((cursor, births.copy(), other))
                    deaths[a] = e     # lower id dies first
                elif alive_a and births[b] == _UNBORN:
                    stack.append((cursor, births.copy(), deaths.copy()))
                    births[b] = e
                elif alive_b and births[a] == _UNBORN:
                    stack.append((cursor, births.copy(), deaths.copy()))
                    births[a] = e
        if not pruned:
            results.append((tuple(births), tuple(deaths)))
    results.sort()
    return [TTessellation(b, d) for b, d in results]


def grid_lines(k: int, a: int) -> list[Line]:
    """The adversarial grid on the unit square: a horizontals, k - a verticals.

    Horizontals sit at heights i/(a+1), verticals at abscissas j/(k-a+1);
    exact rational spacing keeps the construction reproducible.
    """
    if not (1 <= a <= k):
        raise ValueError("need 1 <= a <= k")
    lines = [
        horizontal_line(i - 1, float(Fraction(i, a + 1))) for i in range(1, a + 1)
    ]
    lines += [
        vertical_line(a + j - 1, float(Fraction(j, k - a + 1)))
        for j in range(1, k - a + 1)
    ]
    return lines


@dataclass(frozen=True)
class CountSurvey:
    """Per-trial tessellation counts over random line sets of fixed size."""

    k: int
    trials: int
    seed: int
    counts: tuple[int, ...]
    max_count: int
    argmax_trial: int
    argmax_lines: tuple[Line, ...]


def count_survey(k: int, trials: int, seed: int = 0, vertices=None,
                 budget: int = DEFAULT_BUDGET) -> CountSurvey:
    """Empirical maximum of the tessellation count over random k-line sets."""
    verts = unit_square() if vertices is None else vertices
    counts = []
    best = -1
    best_trial = 0
    best_lines: tuple[Line, ...] = ()
    for trial in range(trials):
        lines = sample_uniform_lines(k, verts, seed=(seed, trial))
        window = choose_time_axis(lines, verts, seed=(seed, trial, 1))
        table = build_event_table(lines, window)
        count = len(enumerate_all(table, budget=budget))
        counts.append(count)
        if count > best:
            best, best_trial, best_lines = count, trial, tuple(lines)
    return CountSurvey(
        k=k,
        trials=trials,
        seed=seed,
        counts=tuple(counts),
        max_count=best,
        argmax_trial=best_trial,
        argmax_lines=best_lines,
    )
