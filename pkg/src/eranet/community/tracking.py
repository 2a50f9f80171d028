"""Dynamic community tracking across era steps.

Step communities are matched to the fronts of live dynamic communities by
Jaccard similarity; a pair matches when the similarity strictly exceeds the
threshold. Matching is many-to-many, so one step can produce several kinds
of events:

birth
    A step community matched no front; a new dynamic community starts.
continuation
    A step community matched exactly one front (or several dynamic
    communities that already share that front after an earlier merge).
merge
    A step community matched dynamic communities with distinct fronts.
    All of them continue, sharing the timeline from this step on.
split
    A dynamic community matched several step communities. It continues with
    the lowest-numbered one; each further match branches off a new dynamic
    community that copies the timeline up to the previous step.
death
    A live dynamic community went unmatched for ``death_window``
    consecutive steps and leaves the live set.

The first partition seeds one dynamic community (a birth) per step community.
"""

from __future__ import annotations

import math
from collections import Counter
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from eranet.community.detection import CommunityPartition
from eranet.errors import UndefinedInputError

BIRTH = "birth"
CONTINUATION = "continuation"
MERGE = "merge"
SPLIT = "split"
DEATH = "death"


def jaccard(a: set | frozenset, b: set | frozenset) -> float:
    if not a and not b:
        raise UndefinedInputError("Jaccard similarity of two empty sets is undefined")
    inter = len(a & b)
    return inter / (len(a) + len(b) - inter)


def diversity(member_eras: Sequence[int], n_eras: int) -> float:
    """Shannon entropy of the era mix, divided by ``log2(n_eras)``."""
    if len(member_eras) == 0:
        raise UndefinedInputError("diversity of an empty community is undefined")
    if n_eras < 2:
        raise ValueError("need at least 2 eras to normalize diversity")
    n = len(member_eras)
    h = 0.0
    for c in Counter(member_eras).values():
        p = c / n
        h -= p * math.log2(p)
    return h / math.log2(n_eras)


@dataclass(frozen=True)
class TrackingConfig:
    theta: float = 0.3
    death_window: int = 1

    def __post_init__(self) -> None:
        if not 0.0 <= self.theta <= 1.0:
            raise ValueError(f"theta must lie in [0, 1], got {self.theta}")
        if self.death_window < 1:
            raise ValueError("death_window must be a positive integer")


@dataclass
class DynamicCommunity:
    id: int
    timeline: list[tuple[int, int]] = field(default_factory=list)
    front: frozenset[str] = frozenset()
    dead: bool = False
    steps_unobserved: int = 0
    merged: bool = False
    parent: int | None = None

    @property
    def front_key(self) -> tuple[int, int]:
        return self.timeline[-1]

    @property
    def steps(self) -> list[int]:
        return [s for s, _ in self.timeline]


@dataclass(frozen=True)
class TrackingEvent:
    step: int
    event: str
    dynamic_ids: tuple[int, ...]
    step_community: int | None


@dataclass
class TrackingResult:
    communities: list[DynamicCommunity]
    events: list[TrackingEvent]
    step_members: dict[tuple[int, int], frozenset[str]]

    def members(self, dc: DynamicCommunity) -> set[str]:
        """Everyone who appeared in any observation of ``dc``."""
        out: set[str] = set()
        for key in dc.timeline:
            out |= self.step_members[key]
        return out

    def event_tuples(self) -> list[tuple[int, str, tuple[int, ...], int | None]]:
        return [(e.step, e.event, e.dynamic_ids, e.step_community) for e in self.events]


def track(partitions: Sequence[CommunityPartition], config: TrackingConfig = TrackingConfig()) -> TrackingResult:
    steps = [p.step for p in partitions]
    if any(b <= a for a, b in zip(steps, steps[1:])):
        raise ValueError("partitions must be ordered by strictly increasing step")
    dynamic: list[DynamicCommunity] = []
    events: list[TrackingEvent] = []
    step_members: dict[tuple[int, int], frozenset[str]] = {}

    def new_dynamic(**kwargs) -> DynamicCommunity:
        dc = DynamicCommunity(id=len(dynamic), **kwargs)
        dynamic.append(dc)
        return dc

    for i, part in enumerate(partitions):
        t = part.step
        comms = part.communities()
        for cid, members in comms.items():
            step_members[(t, cid)] = members
        if i == 0:
            for cid, members in comms.items():
                dc = new_dynamic(timeline=[(t, cid)], front=members)
                events.append(TrackingEvent(t, BIRTH, (dc.id,), cid))
            continue

        live = [dc for dc in dynamic if not dc.dead]
        prior_front = {dc.id: dc.front_key for dc in live}
        by_node: dict[str, list[DynamicCommunity]] = {}
        for dc in live:
            for node in dc.front:
                by_node.setdefault(node, []).append(dc)

        matches: dict[int, list[DynamicCommunity]] = {}
        first_match: dict[int, int] = {}
        for cid, members in comms.items():
            candidates = {dc.id: dc for node in members for dc in by_node.get(node, ())}
            matched = []
            for did in sorted(candidates):
                dc = candidates[did]
                if jaccard(members, dc.front) > config.theta:
                    matched.append(dc)
                    first_match.setdefault(did, cid)
            matches[cid] = matched

        observed: set[int] = set()
        for cid, members in comms.items():
            matched = matches[cid]
            if not matched:
                dc = new_dynamic(timeline=[(t, cid)], front=members)
                observed.add(dc.id)
                events.append(TrackingEvent(t, BIRTH, (dc.id,), cid))
                continue
            distinct_fronts = len({prior_front[dc.id] for dc in matched})
            assigned: list[DynamicCommunity] = []
            for dc in matched:
                if first_match[dc.id] == cid:
                    assigned.append(dc)
                else:
                    branch = new_dynamic(
                        timeline=[key for key in dc.timeline if key[0] < t],
                        merged=dc.merged,
                        parent=dc.id,
                    )
                    events.append(TrackingEvent(t, SPLIT, (dc.id, branch.id), cid))
                    assigned.append(branch)
            ids = tuple(dc.id for dc in assigned)
            if distinct_fronts >= 2:
                events.append(TrackingEvent(t, MERGE, ids, cid))
                for dc in assigned:
                    dc.merged = True
            elif all(first_match[dc.id] == cid for dc in matched):
                events.append(TrackingEvent(t, CONTINUATION, ids, cid))
            for dc in assigned:
                dc.timeline.append((t, cid))
                dc.front = members
                dc.steps_unobserved = 0
                observed.add(dc.id)

        for dc in live:
            if dc.id in observed:
                continue
            dc.steps_unobserved += 1
            if dc.steps_unobserved >= config.death_window:
                dc.dead = True
                events.append(TrackingEvent(t, DEATH, (dc.id,), None))

    return TrackingResult(dynamic, events, step_members)


def _summary(values: Sequence[float]) -> dict[str, float]:
    if len(values) == 0:
        return {"mean": 0.0, "median": 0.0, "q75": 0.0, "max": 0.0}
    arr = np.asarray(values, dtype=float)
    return {
        "mean": float(arr.mean()),
        "median": float(np.percentile(arr, 50)),
        "q75": float(np.percentile(arr, 75)),
        "max": float(arr.max()),
    }


def tracking_summary(result: TrackingResult, eras: Mapping[str, int], n_eras: int) -> dict[str, object]:
    """Counts and member/diversity statistics of one tracking run.

    A dynamic community counts as continued when observed at two or more
    steps, and as merged when it took part in any merge.
    """
    sizes, divs = [], []
    for dc in result.communities:
        members = result.members(dc)
        sizes.append(len(members))
        divs.append(diversity([eras[m] for m in members], n_eras))
    return {
        "n_dynamic": len(result.communities),
        "n_continued": sum(1 for dc in result.communities if len(dc.timeline) >= 2),
        "n_merged": sum(1 for dc in result.communities if dc.merged),
        "members": _summary(sizes),
        "diversity": _summary(divs),
    }


def theta_sweep(
    partitions: Sequence[CommunityPartition],
    thetas: Sequence[float],
    death_window: int,
    eras: Mapping[str, int],
    n_eras: int,
) -> list[dict[str, object]]:
    """Re-run tracking once per threshold; one summary row per theta."""
    rows = []
    for theta in thetas:
        result = track(partitions, TrackingConfig(theta, death_window))
        rows.append({"theta": theta, **tracking_summary(result, eras, n_eras)})
    return rows


def theta_range(start: float, stop: float, step: float) -> list[float]:
    """Inclusive arithmetic range, rounded to dodge float drift (0:0.95:0.05 gives 20 values)."""
    if step <= 0:
        raise ValueError("step must be positive")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 10) for i in range(n)]


def era_presence_patterns(result: TrackingResult, n_steps: int, steps: Sequence[int] | None = None) -> list[dict]:
    """Group dynamic communities by the set of steps they were observed at.

    ``steps`` lists the step indices in order (default ``0..n_steps-1``).
    Size is the number of distinct members over the whole timeline.
    """
    steps = list(steps) if steps is not None else list(range(n_steps))
    position = {s: i for i, s in enumerate(steps)}
    groups: dict[tuple[bool, ...], list[int]] = {}
    for dc in result.communities:
        marks = [False] * len(steps)
        for s in dc.steps:
            marks[position[s]] = True
        groups.setdefault(tuple(marks), []).append(len(result.members(dc)))
    rows = [
        {"pattern": pat, "count": len(sizes), "avg_size": sum(sizes) / len(sizes)}
        for pat, sizes in groups.items()
    ]
    rows.sort(key=lambda r: tuple(not m for m in r["pattern"]))
    return rows
