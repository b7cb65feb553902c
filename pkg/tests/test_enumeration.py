import itertools
import math

import pytest

from ttess import (
    BudgetExceeded,
    Classification,
    Prototessellation,
    Window,
    build_event_table,
    build_scene,
    choose_time_axis,
    count_survey,
    enumerate_all,
    grid_lines,
    horizontal_line,
    unit_square,
    validate,
)

from conftest import oblique_table, random_scene


def mark_assignment_tessellations(table):
    """Independent dumb oracle: try every (birth, death) pair per line and
    keep the combinations the validator accepts."""
    per_line = []
    for l in range(table.k):
        events = table.per_line[l]
        per_line.append(
            [(b, d) for i, b in enumerate(events) for d in events[i + 1:]]
        )
    accepted = []
    for combo in itertools.product(*per_line):
        births = tuple(b for b, _ in combo)
        deaths = tuple(d for _, d in combo)
        report = validate(Prototessellation(births, deaths), table)
        if report.classification is Classification.TTESS:
            accepted.append((births, deaths))
    return sorted(accepted)


def test_empty_line_set_has_one_tessellation():
    _, table = build_scene([], unit_square(), seed=0)
    result = enumerate_all(table)
    assert len(result) == 1
    assert result[0].births == () and result[0].deaths == ()


def test_single_line_only_full_chord():
    _, table = build_scene([horizontal_line(0, 0.4)], unit_square(), seed=0)
    result = enumerate_all(table)
    assert len(result) == 1
    assert result[0].births == (0,) and result[0].deaths == (1,)


def test_two_crossing_lines_give_four(cross_table):
    result = enumerate_all(cross_table)
    assert len(result) == 4
    assert sorted(t.marks() for t in result) == [
        ((0, 1), (2, 3)),   # l1 full, l0 dies at the crossing
        ((0, 1), (4, 2)),   # l0 full, l1 dies at the crossing
        ((0, 2), (4, 3)),   # l0 full, l1 born at the crossing
        ((2, 1), (4, 3)),   # l1 full, l0 born at the crossing
    ]


def test_two_nonintersecting_lines_give_one():
    table = oblique_table([horizontal_line(0, 0.3), horizontal_line(1, 0.6)])
    result = enumerate_all(table)
    assert len(result) == 1


def test_every_output_validates():
    for seed in (0, 5):
        _, _, table = random_scene(5, seed)
        for tess in enumerate_all(table):
            assert validate(tess, table).classification is Classification.TTESS


def test_outputs_unique_and_sorted():
    _, _, table = random_scene(5, 7)
    result = [t.marks() for t in enumerate_all(table)]
    assert result == sorted(result)
    assert len(result) == len(set(result))


def test_agreement_with_mark_assignment_oracle():
    for k, seed in [(2, 0), (3, 1), (4, 2), (4, 3)]:
        _, _, table = random_scene(k, seed)
        swept = sorted(t.marks() for t in enumerate_all(table))
        assert swept == mark_assignment_tessellations(table)


def test_axis_invariance_of_count():
    lines = grid_lines(4, 2)
    w1 = choose_time_axis(lines, unit_square(), seed=0)
    w2 = choose_time_axis(lines, unit_square(), seed=1)
    assert w1.time_axis != w2.time_axis
    c1 = len(enumerate_all(build_event_table(lines, w1)))
    c2 = len(enumerate_all(build_event_table(lines, w2)))
    assert c1 == c2


def test_axis_invariance_random_set():
    lines, _, table = random_scene(5, 13)
    other = Window.with_axis(
        unit_square(), (math.cos(1.234), math.sin(1.234))
    )
    other_table = build_event_table(lines, other)
    assert len(enumerate_all(table)) == len(enumerate_all(other_table))


def test_grid_positions():
    lines = grid_lines(3, 1)
    assert [(l.alpha, l.p) for l in lines] == [
        (math.pi / 2, 0.5),
        (0.0, pytest.approx(1 / 3)),
        (0.0, pytest.approx(2 / 3)),
    ]
    lines = grid_lines(4, 2)
    assert [l.p for l in lines] == [
        pytest.approx(1 / 3), pytest.approx(2 / 3),
        pytest.approx(1 / 3), pytest.approx(2 / 3),
    ]


def test_grid_lower_bound_small():
    for k, a in [(3, 1), (4, 2)]:
        lines = grid_lines(k, a)
        _, table = build_scene(lines, unit_square(), seed=0)
        count = len(enumerate_all(table))
        assert count >= (k - a + 1) ** a


def test_all_horizontal_grid_has_single_tessellation():
    lines = grid_lines(3, 3)
    assert all(l.alpha == math.pi / 2 for l in lines)
    _, table = build_scene(lines, unit_square(), seed=0)
    assert len(enumerate_all(table)) == 1


def test_grid_requires_valid_a():
    with pytest.raises(ValueError):
        grid_lines(3, 0)
    with pytest.raises(ValueError):
        grid_lines(3, 4)


def test_budget_exceeded_carries_lines():
    lines = grid_lines(5, 2)
    _, table = build_scene(lines, unit_square(), seed=0)
    with pytest.raises(BudgetExceeded) as info:
        enumerate_all(table, budget=3)
    assert info.value.lines == table.lines


def test_upper_bound_on_samples():
    for k in (2, 3, 4):
        for seed in range(4):
            _, _, table = random_scene(k, seed)
            assert len(enumerate_all(table)) <= (4 * k) ** k


def test_count_survey_deterministic_and_two_line_max():
    survey = count_survey(2, trials=12, seed=0)
    again = count_survey(2, trials=12, seed=0)
    assert survey.counts == again.counts
    assert survey.max_count == 4
    assert survey.counts[survey.argmax_trial] == survey.max_count
    assert len(survey.argmax_lines) == 2


def test_count_survey_k3_beats_grid_floor():
    # the empirical maximum dominates the (k-a+1)^a floor of the grid
    survey = count_survey(3, trials=10, seed=0)
    assert survey.max_count >= 3
    assert survey.max_count <= (4 * 3) ** 3
