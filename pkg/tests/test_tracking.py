import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from eranet.community import (
    CommunityPartition,
    TrackingConfig,
    diversity,
    era_presence_patterns,
    jaccard,
    theta_range,
    theta_sweep,
    track,
    tracking_summary,
)
from eranet.errors import UndefinedInputError


def part(step, *blocks):
    return CommunityPartition(step, {str(n): cid for cid, block in enumerate(blocks) for n in block})


MERGE = [part(0, {1, 2, 3}, {4, 5}), part(1, {1, 2, 3, 4, 5})]
SPLIT = [part(0, {1, 2, 3, 4}), part(1, {1, 2}, {3, 4})]
BIRTH = [part(0, {1, 2, 3}), part(1, {1, 2, 3}, {7, 8, 9})]
DEATH = [part(0, {1, 2, 3}, {4, 5, 6}), part(1, {1, 2, 3})]


def test_jaccard():
    assert jaccard({1, 2}, {1, 2}) == 1.0
    assert jaccard({1}, {2}) == 0.0
    assert jaccard({"a", "b", "c"}, {"b", "c", "d"}) == 0.5
    with pytest.raises(UndefinedInputError):
        jaccard(set(), set())


def test_diversity_values():
    assert diversity([2, 2, 2], 6) == 0.0
    assert abs(diversity(list(range(6)) * 3, 6) - 1.0) <= 1e-12
    assert abs(diversity([0, 0, 1, 1], 6) - 1 / math.log2(6)) <= 1e-12
    assert round(diversity([0, 1], 6), 5) == 0.38685
    with pytest.raises(UndefinedInputError):
        diversity([], 6)


@given(st.lists(st.integers(0, 5), min_size=1, max_size=60))
def test_diversity_bounds_and_oracle(eras):
    d = diversity(eras, 6)
    assert -1e-12 <= d <= 1 + 1e-12
    assert abs(d - oracles.entropy_diversity(eras, 6)) <= 1e-12


def test_merge_fixture():
    result = track(MERGE, TrackingConfig(0.3, 1))
    assert result.event_tuples() == [
        (0, "birth", (0,), 0),
        (0, "birth", (1,), 1),
        (1, "merge", (0, 1), 0),
    ]
    a, b = result.communities
    assert a.timeline == [(0, 0), (1, 0)] and b.timeline == [(0, 1), (1, 0)]
    assert a.front == b.front == frozenset("12345")
    assert a.merged and b.merged


def test_split_fixture():
    result = track(SPLIT, TrackingConfig(0.3, 1))
    assert result.event_tuples() == [
        (0, "birth", (0,), 0),
        (1, "continuation", (0,), 0),
        (1, "split", (0, 1), 1),
    ]
    assert result.communities[1].parent == 0
    assert result.communities[1].timeline == [(0, 0), (1, 1)]


def test_birth_fixture():
    result = track(BIRTH, TrackingConfig(0.3, 1))
    assert result.event_tuples()[-2:] == [(1, "continuation", (0,), 0), (1, "birth", (1,), 1)]


def test_death_fixture():
    result = track(DEATH, TrackingConfig(0.3, 1))
    assert result.event_tuples()[-2:] == [(1, "continuation", (0,), 0), (1, "death", (1,), None)]
    assert result.communities[1].dead


def test_death_window_two():
    steps = DEATH + [part(2, {1, 2, 3})]
    events = track(steps, TrackingConfig(0.3, 2)).event_tuples()
    assert (1, "death", (1,), None) not in events
    assert (2, "death", (1,), None) in events


def test_reappearance_within_window():
    steps = [part(0, {1, 2, 3}, {4, 5, 6}), part(1, {1, 2, 3}), part(2, {1, 2, 3}, {4, 5, 6})]
    events = track(steps, TrackingConfig(0.3, 2)).event_tuples()
    assert (2, "continuation", (1,), 1) in events
    assert not any(e[1] == "death" for e in events)


def test_high_threshold_gives_births():
    events = track(MERGE, TrackingConfig(0.95, 1)).event_tuples()
    assert [e[1] for e in events if e[0] == 1] == ["birth", "death", "death"]
    assert sum(1 for e in events if e[:2] == (1, "birth")) == 1
    first_step_births = sum(1 for e in events if e[:2] == (0, "birth"))
    assert first_step_births == 2


def test_zero_threshold_matches_any_overlap():
    steps = [part(0, {1, 2, 3, 4, 5, 6, 7, 8, 9}), part(1, {9, 10, 11, 12, 13, 14, 15, 16, 17, 18})]
    events = track(steps, TrackingConfig(0.0, 1)).event_tuples()
    assert events[-1] == (1, "continuation", (0,), 0)


def test_config_validation():
    with pytest.raises(ValueError):
        TrackingConfig(1.5)
    with pytest.raises(ValueError):
        TrackingConfig(0.3, 0)


def test_steps_must_increase():
    with pytest.raises(ValueError):
        track([part(1, {1}), part(0, {1})])


def test_theta_range_has_twenty_values():
    thetas = theta_range(0, 0.95, 0.05)
    assert len(thetas) == 20 and thetas[0] == 0.0 and thetas[-1] == 0.95


def test_sweep_rows():
    eras = {str(n): n % 2 for n in range(1, 6)}
    rows = theta_sweep(MERGE, theta_range(0, 0.95, 0.05), 1, eras, 6)
    assert len(rows) == 20
    assert rows[0]["n_dynamic"] == 2 and rows[0]["n_merged"] == 2
    assert rows[-1]["n_dynamic"] == 3 and rows[-1]["n_merged"] == 0


def test_summary_member_union():
    result = track(SPLIT, TrackingConfig(0.3, 1))
    summary = tracking_summary(result, {str(n): 0 for n in range(1, 5)}, 6)
    assert summary["n_dynamic"] == 2 and summary["n_continued"] == 2
    assert summary["members"]["max"] == 4.0
    assert summary["diversity"]["max"] == 0.0


def test_presence_patterns():
    steps = [part(0, {1, 2, 3}, {4, 5, 6}), part(1, {1, 2, 3}), part(2, {1, 2, 3})]
    rows = era_presence_patterns(track(steps, TrackingConfig(0.3, 1)), 3)
    assert rows[0]["pattern"] == (True, True, True) and rows[0]["count"] == 1
    assert rows[1]["pattern"] == (True, False, False)


def test_presence_pattern_average_size():
    big = set(range(100, 120))
    small = set(range(200, 210))
    rows = era_presence_patterns(track([part(0, big, small)], TrackingConfig()), 1)
    assert rows == [{"pattern": (True,), "count": 2, "avg_size": 15.0}]


@settings(max_examples=40, deadline=None)
@given(
    blocks=st.lists(st.lists(st.integers(0, 30), min_size=1, max_size=12), min_size=1, max_size=6),
    n_steps=st.integers(2, 5),
    theta=st.floats(0, 0.95),
)
def test_tracking_invariants(blocks, n_steps, theta):
    # each step regroups the same pool of nodes differently
    steps = []
    for t in range(n_steps):
        assignment = {}
        for i, block in enumerate(blocks):
            for node in block:
                assignment.setdefault(str(node + t), (i + t) % len(blocks))
        cids = {c: j for j, c in enumerate(sorted(set(assignment.values())))}
        steps.append(CommunityPartition(t, {n: cids[c] for n, c in assignment.items()}))
    result = track(steps, TrackingConfig(theta, 1))
    observed = {key for dc in result.communities for key in dc.timeline}
    every = {(p.step, cid) for p in steps for cid in p.communities()}
    assert observed == every
    for dc in result.communities:
        assert [s for s, _ in dc.timeline] == sorted({s for s, _ in dc.timeline})
