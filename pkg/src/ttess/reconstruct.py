"""Labelling schemes that characterise a tessellation, and their rebuilds.

Two schemes are implemented. The first gives every line its birth mark plus
a murder count (how many segments die on it); one timewise sweep rebuilds
the tessellation exactly. The second withholds the births of an *orphan*
subset and instead supplies leaf flags, virtual murder counts and per-line
orphan-children counts; the rebuild initialises with a counter-driven sweep
and then alternates a backward parent-seeking pass with a forward cutting
pass until no segment shrinks.

Throughout a scheme-2 rebuild the working marks never precede the source
tessellation's ("late events"), lines whose parent is still unknown are
strictly late, and every mark update strictly decreases a rank. These are
checked on the fly whenever the source tessellation is passed in as
``truth``; a failure raises AssertionError since it can only mean a fault
in this module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import (
    InconsistentScheme,
    InvalidReduction,
    NonTermination,
    SchemeViolation,
)
from .geometry import BORDER, EventKind, EventTable
from .tessellation import (
    Pretessellation,
    Prototessellation,
    TTessellation,
    birth_tree,
    murder_counts,
    other_children_counts,
)


@dataclass(frozen=True)
class Scheme1:
    """Complete births plus murder counts (border count is infinite)."""

    births: tuple[int, ...]
    murders: dict

    @property
    def k(self) -> int:
        return len(self.births)


@dataclass(frozen=True)
class Scheme2:
    """Partial births: orphan lines are described only through counters.

    ``births`` covers exactly the non-orphan lines. ``virtual_murders`` is
    the kill count each line has in the auxiliary pretessellation built by
    the initialisation sweep; ``other_children`` counts the orphan segments
    born on each line (border included in both, with an infinite virtual
    murder count).
    """

    leaves: frozenset
    orphans: frozenset
    births: dict
    virtual_murders: dict
    other_children: dict


@dataclass(frozen=True)
class ReconstructionDiff:
    """Lines whose rebuilt marks differ from the source tessellation's."""

    wrong_birth: frozenset
    wrong_death: frozenset

    @property
    def wrong_segment(self) -> frozenset:
        return self.wrong_birth | self.wrong_death

    @staticmethod
    def between(rebuilt: Prototessellation, truth: Prototessellation) -> "ReconstructionDiff":
        wb = frozenset(
            l for l in range(len(truth.births)) if rebuilt.births[l] != truth.births[l]
        )
        wd = frozenset(
            l for l in range(len(truth.deaths)) if rebuilt.deaths[l] != truth.deaths[l]
        )
        return ReconstructionDiff(wb, wd)


def extract_scheme1(tess: TTessellation, table: EventTable) -> Scheme1:
    return Scheme1(births=tess.births, murders=murder_counts(tess, table))


def rebuild_from_scheme1(table: EventTable, scheme: Scheme1) -> TTessellation:
    """One timewise sweep: whenever two segments cover a crossing strictly,
    the one whose remaining murder count is zero dies there and the other's
    count drops by one. With a scheme extracted from a real tessellation the
    output matches it mark for mark.
    """
    one = table.one_mark
    births = scheme.births
    deaths = [one] * table.k
    remaining = dict(scheme.murders)
    remaining.setdefault(BORDER, math.inf)

    def birth(l: int) -> int:
        return -1 if l == BORDER else births[l]

    def death(l: int) -> int:
        return one if l == BORDER else deaths[l]

    for e in range(one):
        a, b = table.lines_of(e)
        if not (birth(a) < e < death(a) and birth(b) < e < death(b)):
            continue
        if remaining[a] == 0 and remaining[b] == 0:
            raise InconsistentScheme(
                f"both murder counters exhausted at event {e}: "
                "the labelling implies a shared death"
            )
        if remaining[a] == 0:
            deaths[a] = e
            remaining[b] -= 1
        elif remaining[b] == 0:
            deaths[b] = e
            remaining[a] -= 1
        else:
            raise InconsistentScheme(
                f"no murder counter exhausted at event {e}: "
                "the labelling implies a crossing"
            )
    return TTessellation(tuple(births), tuple(deaths))


def initial_pretessellation(tess: TTessellation, table: EventTable,
                            orphans) -> Pretessellation:
    """The auxiliary pretessellation the scheme-2 initialisation produces.

    Non-orphans keep their true birth; an orphan is born at its first
    child's birth event (never, if it has no child). Deaths are found by a
    timewise sweep: wherever two current segments cover an event, a line
    dies there as soon as its true death is at or before it; both lines may
    die together.
    """
    one = table.one_mark
    k = table.k
    births = list(tess.births)
    for o in orphans:
        child_markers = [
            tess.births[m]
            for m in range(k)
            if m != o
            and table.kind_of(tess.births[m]) is EventKind.CROSSING
            and table.other_line(tess.births[m], m) == o
        ]
        births[o] = min(child_markers, default=one)

    deaths = [one] * k

    def covers(l: int, e: int) -> bool:
        if l == BORDER:
            return True
        return births[l] <= e <= deaths[l]

    for e in range(one):
        a, b = table.lines_of(e)
        if covers(a, e) and covers(b, e):
            if tess.deaths[a] <= e:
                deaths[a] = e
            if b != BORDER and tess.deaths[b] <= e:
                deaths[b] = e
    return Pretessellation(tuple(births), tuple(deaths))


def virtual_murder_counts(pre: Pretessellation, table: EventTable) -> dict:
    """Kill counts in the auxiliary pretessellation; simultaneous deaths at
    a crossing count for neither line, and the border's count is infinite.
    """
    counts = {l: 0 for l in range(table.k)}
    counts[BORDER] = math.inf
    one = table.one_mark
    for m in range(table.k):
        mark = pre.deaths[m]
        if mark < one and table.kind_of(mark) is EventKind.CROSSING:
            l = table.other_line(mark, m)
            death_l = pre.deaths[l]
            if mark < death_l:
                counts[l] += 1
    return counts


def validate_scheme2(scheme: Scheme2, table: EventTable) -> None:
    """Structural requirements a scheme-2 labelling must satisfy."""
    k = table.k
    lines = set(range(k))
    if not scheme.orphans <= lines or not scheme.leaves <= lines:
        raise SchemeViolation("orphans and leaves must be line ids")
    if scheme.orphans & scheme.leaves:
        raise SchemeViolation("an orphan line cannot be a leaf")
    if set(scheme.births) != lines - scheme.orphans:
        raise SchemeViolation("births must be given exactly for non-orphan lines")
    for l, mark in scheme.births.items():
        if not (0 <= mark < table.one_mark) or not table.on_line(mark, l):
            raise SchemeViolation(f"birth of line {l} is not an event on it")
        if table.kind_of(mark) is EventKind.CROSSING:
            parent = table.other_line(mark, l)
            if parent in scheme.leaves:
                raise SchemeViolation(f"leaf {parent} appears as a parent")
    for o in scheme.orphans:
        has_child = any(
            table.kind_of(mark) is EventKind.CROSSING
            and table.other_line(mark, l) == o
            for l, mark in scheme.births.items()
        )
        if not has_child:
            raise SchemeViolation(
                f"orphan {o} has no given first child; it could never be born"
            )
    for name, counter in (
        ("virtual murder", scheme.virtual_murders),
        ("other children", scheme.other_children),
    ):
        if set(counter) != lines | {BORDER}:
            raise SchemeViolation(f"{name} counts must cover all lines and the border")
        for l in lines:
            value = counter[l]
            if value != int(value) or value < 0:
                raise SchemeViolation(f"{name} count of line {l} must be a count")
    if not math.isinf(scheme.virtual_murders[BORDER]):
        raise SchemeViolation("the border's virtual murder count must be infinite")
    if sum(scheme.virtual_murders[l] for l in lines) > k:
        raise SchemeViolation("more virtual murders than lines")
    if sum(scheme.other_children.values()) != len(scheme.orphans):
        raise SchemeViolation("other-children counts must sum to the orphan count")


def select_initial_orphans(tess: TTessellation, table: EventTable) -> frozenset:
    """Interior birth-tree nodes of the better generation parity.

    Taking one parity class keeps every orphan's parent and first child
    outside the orphan set; the larger class maximises the orphan count.
    Ties go to the even generations.
    """
    tree = birth_tree(tess, table)
    interior = tree.interior
    even = frozenset(l for l in interior if tree.generation[l] % 2 == 0)
    odd = interior - even
    return even if len(even) >= len(odd) else odd


def build_scheme2(tess: TTessellation, table: EventTable, orphans) -> Scheme2:
    """Assemble (and check) the scheme-2 labelling of a tessellation."""
    orphans = frozenset(orphans)
    tree = birth_tree(tess, table)
    pre = initial_pretessellation(tess, table, orphans)
    scheme = Scheme2(
        leaves=tree.leaves,
        orphans=orphans,
        births={l: tess.births[l] for l in range(table.k) if l not in orphans},
        virtual_murders=virtual_murder_counts(pre, table),
        other_children=other_children_counts(tess, table, orphans),
    )
    validate_scheme2(scheme, table)
    return scheme


@dataclass(frozen=True)
class RebuildResult:
    pretessellation: Pretessellation
    rounds: int
    reorphaned: int


@dataclass(frozen=True)
class CutResult:
    cuts: bool
    pretessellation: Pretessellation
    unparented: frozenset


class _Marks:
    """Mutable working marks with strict-decrease checking."""

    __slots__ = ("births", "deaths", "one")

    def __init__(self, births, deaths, one):
        self.births = births
        self.deaths = deaths
        self.one = one

    def birth(self, l: int) -> int:
        return -1 if l == BORDER else self.births[l]

    def death(self, l: int) -> int:
        return self.one if l == BORDER else self.deaths[l]

    def set_birth(self, l: int, e: int) -> None:
        assert e < self.births[l], "birth marks must strictly decrease"
        self.births[l] = e

    def set_death(self, l: int, e: int) -> None:
        assert e < self.deaths[l], "death marks must strictly decrease"
        self.deaths[l] = e

    def snapshot(self) -> Pretessellation:
        return Pretessellation(tuple(self.births), tuple(self.deaths))


def _initial_sweep(table: EventTable, scheme: Scheme2, marks: _Marks) -> None:
    """Timewise pass: discover orphan births from their first child, resolve
    crossings by the virtual murder counters (both lines may die at once).
    """
    virtual = dict(scheme.virtual_murders)
    one = table.one_mark
    for e in range(one):
        a, b = table.lines_of(e)
        if b != BORDER and marks.births[a] == e and marks.births[b] > e:
            marks.set_birth(b, e)
        elif b != BORDER and marks.births[b] == e and marks.births[a] > e:
            marks.set_birth(a, e)
        elif (marks.birth(a) < e <= marks.death(a)
              and marks.birth(b) < e <= marks.death(b)):
            if virtual[a] == 0:
                marks.set_death(a, e)
                if virtual[b] == 0:
                    if b == BORDER:
                        raise SchemeViolation("counters would kill the border")
                    marks.set_death(b, e)
                else:
                    virtual[b] -= 1
            else:
                if b == BORDER:
                    raise SchemeViolation("counters would kill the border")
                virtual[a] -= 1
                marks.set_death(b, e)


def _parent_seek_pass(table: EventTable, marks: _Marks, unparented: set) -> None:
    """Reverse-timewise pass extending each unparented line's birth backward
    to the latest event strictly covered by another segment (or the border).
    A line moves at most once and leaves the set when it does.
    """
    for e in range(table.one_mark - 1, -1, -1):
        a, b = table.lines_of(e)
        if (a in unparented and marks.births[a] > e
                and marks.birth(b) < e < marks.death(b)):
            marks.set_birth(a, e)
            unparented.discard(a)
        if (b != BORDER and b in unparented and marks.births[b] > e
                and marks.birth(a) < e < marks.death(a)):
            marks.set_birth(b, e)
            unparented.discard(b)


def _cutting_pass(table: EventTable, orphans, other_children, marks: _Marks,
                  reorphaned: set, nonstrict_reorphan: bool) -> bool:
    """Timewise pass counting apparent orphan children per line; a line whose
    counter passes its quota is cut at the offending child's event, and
    children beyond the quota lose their parent again. Deaths only decrease.
    """
    counters = {l: 0 for l in range(table.k)}
    counters[BORDER] = 0
    cuts = False
    for e in range(table.one_mark):
        a, b = table.lines_of(e)
        if a in orphans and marks.births[a] == e:
            child, parent = a, b
        elif b != BORDER and b in orphans and marks.births[b] == e:
            child, parent = b, a
        else:
            continue
        counters[parent] += 1
        quota = other_children[parent]
        if counters[parent] == quota + 1:
            if parent == BORDER:
                raise SchemeViolation(
                    "more orphans born on the border than the scheme allows"
                )
            if e < marks.deaths[parent]:
                marks.set_death(parent, e)
                cuts = True
        over = counters[parent] >= quota if nonstrict_reorphan else counters[parent] > quota
        if over:
            reorphaned.add(child)
    return cuts


def parent_seek(table: EventTable, pretess: Prototessellation,
                unparented) -> tuple[Pretessellation, frozenset]:
    """Public wrapper around the backward pass; returns new marks and set."""
    marks = _Marks(list(pretess.births), list(pretess.deaths), table.one_mark)
    remaining = set(unparented)
    _parent_seek_pass(table, marks, remaining)
    return marks.snapshot(), frozenset(remaining)


def cutting(table: EventTable, pretess: Prototessellation, orphans,
            other_children, *, nonstrict_reorphan: bool = False) -> CutResult:
    """Public wrapper around the cutting pass; returns cuts flag, marks, set."""
    marks = _Marks(list(pretess.births), list(pretess.deaths), table.one_mark)
    reorphaned: set[int] = set()
    cuts = _cutting_pass(
        table, frozenset(orphans), other_children, marks, reorphaned,
        nonstrict_reorphan,
    )
    return CutResult(cuts, marks.snapshot(), frozenset(reorphaned))


def _check_late_events(marks: _Marks, unparented, truth: Prototessellation,
                       stage: str) -> None:
    for l in range(len(truth.births)):
        assert marks.births[l] >= truth.births[l], (
            f"{stage}: birth of line {l} precedes the source tessellation's"
        )
        assert marks.deaths[l] >= truth.deaths[l], (
            f"{stage}: death of line {l} precedes the source tessellation's"
        )
    for l in unparented:
        assert marks.births[l] > truth.births[l], (
            f"{stage}: unparented line {l} is not strictly late"
        )


def rebuild_from_scheme2(table: EventTable, scheme: Scheme2, *,
                         truth: Prototessellation | None = None,
                         nonstrict_reorphan: bool = False) -> RebuildResult:
    """Rebuild a tessellation from a scheme-2 labelling.

    Initialisation sweeps once through time; then parent-seeking and cutting
    alternate until a round cuts nothing. The iteration cap (#events * k)
    can only trip on an implementation fault, never on valid input. Passing
    the source tessellation as ``truth`` switches on the late-events checks
    and the initialisation identity check.
    """
    validate_scheme2(scheme, table)
    one = table.one_mark
    k = table.k
    births = [one] * k
    deaths = [one] * k
    for l, mark in scheme.births.items():
        births[l] = mark
    marks = _Marks(births, deaths, one)
    unparented = set(scheme.orphans)

    _initial_sweep(table, scheme, marks)
    if truth is not None:
        reference = initial_pretessellation(
            TTessellation(truth.births, truth.deaths), table, scheme.orphans
        )
        assert marks.snapshot().marks() == reference.marks(), (
            "initialisation differs from the auxiliary pretessellation"
        )
        _check_late_events(marks, unparented, truth, "after initialisation")

    cap = max(1, one * max(1, k))
    rounds = 0
    reorphaned_total = 0
    while True:
        rounds += 1
        if rounds > cap:
            raise NonTermination(f"rebuild still cutting after {cap} rounds")
        _parent_seek_pass(table, marks, unparented)
        if truth is not None:
            _check_late_events(marks, unparented, truth, f"round {rounds} seek")
        reorphaned: set[int] = set()
        cuts = _cutting_pass(
            table, scheme.orphans, scheme.other_children, marks, reorphaned,
            nonstrict_reorphan,
        )
        reorphaned_total += len(reorphaned - unparented)
        unparented |= reorphaned
        if truth is not None:
            _check_late_events(marks, unparented, truth, f"round {rounds} cut")
        if not cuts:
            break
    return RebuildResult(marks.snapshot(), rounds, reorphaned_total)


def refine_orphans(tess: TTessellation, table: EventTable, orphans,
                   rebuilt: Prototessellation | None = None) -> frozenset:
    """Shrink the orphan set after a rebuild got some births wrong.

    Takes the lowest-id wrongly-born line, finds the line supporting its
    fake birth, and removes that line's true killer from the orphan set;
    re-running the rebuild then has at least two fewer wrong births. Raises
    InvalidReduction when the construction escapes the orphan set (or runs
    through the border), which would contradict the refinement argument.
    """
    orphans = frozenset(orphans)
    if rebuilt is None:
        rebuilt = rebuild_from_scheme2(
            table, build_scheme2(tess, table, orphans)
        ).pretessellation
    wrong = sorted(
        l for l in range(table.k) if rebuilt.births[l] != tess.births[l]
    )
    if not wrong:
        raise ValueError("refine_orphans called with nothing to refine")
    first = wrong[0]
    fake_birth = rebuilt.births[first]
    if fake_birth >= table.one_mark:
        raise InvalidReduction(f"line {first} was never born in the rebuild")
    if table.kind_of(fake_birth) is not EventKind.CROSSING:
        raise InvalidReduction(f"fake parent of line {first} is the border")
    fake_parent = table.other_line(fake_birth, first)
    true_death = tess.deaths[fake_parent]
    if table.kind_of(true_death) is not EventKind.CROSSING:
        raise InvalidReduction(
            f"true killer of line {fake_parent} is the border"
        )
    killer = table.other_line(true_death, fake_parent)
    if killer not in orphans:
        raise InvalidReduction(
            f"true killer {killer} of line {fake_parent} is not an orphan"
        )
    return orphans - {killer}


@dataclass(frozen=True)
class CertifiedScheme2:
    """A scheme-2 labelling whose rebuild reproduces the source exactly."""

    scheme: Scheme2
    orphan_count: int
    leaf_count: int
    refinements: int
    fallbacks: int
    rounds_total: int
    flagged: bool
    wrong_birth_history: tuple[int, ...]
    bookkeeping: dict


def _counting_bookkeeping(k: int, z: int, u: int) -> dict:
    parents_exponent = k - u
    return {
        "k": k,
        "leaves": z,
        "orphans": u,
        "leaf_labelings": 2 ** k,
        "parent_labelings": (k + 1 - z) ** parents_exponent,
        "split_bound": math.comb(2 * k, k) ** 2,
        "parents_exponent": parents_exponent,
        "parents_exponent_bound": (3 * k + z) / 4,
        "parents_exponent_ok": parents_exponent <= (3 * k + z) / 4,
        "orphan_floor": math.ceil((k - z) / 4),
    }


def extract_scheme2(tess: TTessellation, table: EventTable) -> CertifiedScheme2:
    """Parity selection plus refinement until the rebuild is exact.

    When the refinement step cannot identify the orphan to drop (flagged
    via InvalidReduction), the lowest-id wrongly-born line is dropped from
    the orphan set instead; the certificate records how often that fallback
    fired, and the orphan-count floor only binds when it never did.
    """
    orphans = select_initial_orphans(tess, table)
    refinements = 0
    fallbacks = 0
    rounds_total = 0
    history: list[int] = []
    while True:
        scheme = build_scheme2(tess, table, orphans)
        run = rebuild_from_scheme2(table, scheme, truth=tess)
        rounds_total += run.rounds
        diff = ReconstructionDiff.between(run.pretessellation, tess)
        assert diff.wrong_birth <= orphans, (
            "a non-orphan birth changed during the rebuild"
        )
        history.append(len(diff.wrong_birth))
        if not diff.wrong_birth:
            assert run.pretessellation.marks() == tess.marks(), (
                "all births right but the rebuild still differs"
            )
            break
        try:
            orphans = refine_orphans(tess, table, orphans, rebuilt=run.pretessellation)
        except InvalidReduction:
            fallbacks += 1
            orphans = orphans - {min(diff.wrong_birth)}
        refinements += 1

    tree = birth_tree(tess, table)
    z = len(tree.leaves)
    return CertifiedScheme2(
        scheme=scheme,
        orphan_count=len(orphans),
        leaf_count=z,
        refinements=refinements,
        fallbacks=fallbacks,
        rounds_total=rounds_total,
        flagged=fallbacks > 0,
        wrong_birth_history=tuple(history),
        bookkeeping=_counting_bookkeeping(table.k, z, len(orphans)),
    )
