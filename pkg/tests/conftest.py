import math

import pytest

from ttess import (
    TTessellation,
    Window,
    build_event_table,
    build_scene,
    horizontal_line,
    sample_uniform_lines,
    unit_square,
    vertical_line,
)

OBLIQUE_AXIS = (math.cos(0.3), math.sin(0.3))


def oblique_table(lines):
    """Event table on the unit square under a fixed oblique axis, so event
    ranks in hand-written fixtures stay stable."""
    window = Window.with_axis(unit_square(), OBLIQUE_AXIS)
    return build_event_table(lines, window)


def random_scene(k, seed):
    lines = sample_uniform_lines(k, unit_square(), seed=(seed, k))
    window, table = build_scene(lines, unit_square(), seed=(seed, k, 1))
    return lines, window, table


@pytest.fixture
def cross_table():
    """Two crossing lines; events: 0 entry(l0), 1 entry(l1), 2 crossing,
    3 exit(l1), 4 exit(l0) -- under the fixed oblique axis."""
    return oblique_table([horizontal_line(0, 0.5), vertical_line(1, 0.5)])


@pytest.fixture
def chain_table():
    """Three lines l0: y=.5, l1: x=.5, l2: y=.75; ranks 0..7 as in the
    hand fixtures: 3 = crossing(l0,l1), 4 = crossing(l1,l2)."""
    return oblique_table(
        [horizontal_line(0, 0.5), vertical_line(1, 0.5), horizontal_line(2, 0.75)]
    )


@pytest.fixture
def chain_tessellation():
    """On chain_table: l0 full, l1 born on l0, l2 born on l1."""
    return TTessellation((0, 3, 4), (6, 5, 7))


@pytest.fixture
def chain_kill_tessellation():
    """On chain_table: l1 full (born at border), killing l0 at their crossing."""
    return TTessellation((0, 2, 4), (3, 5, 7))
