"""Era assignment by lifespan midpoint and repair of era-reversing links."""

from __future__ import annotations

import heapq
import logging
from collections.abc import Callable
from dataclasses import dataclass, field

from eranet.errors import NonConvergenceError, PreconditionError
from eranet.model import EraScheme, InfluenceEdge, InfluenceNetwork, Scholar, era_of_year

logger = logging.getLogger(__name__)

DEFAULT_ACTIVITY_OFFSET = 20

BACKWARD = "backward"
FORWARD = "forward"
MINIMAL = "minimal"

# (source id, target id, current eras, network) -> BACKWARD or FORWARD
PolicyFn = Callable[[str, str, dict[str, int], InfluenceNetwork], str]


def active_midpoint(scholar: Scholar, activity_offset: int = DEFAULT_ACTIVITY_OFFSET) -> int:
    active_start = scholar.birth_year + activity_offset
    if active_start >= scholar.death_year:
        active_start = scholar.birth_year
    return (active_start + scholar.death_year) // 2


def assign_initial_era(
    scholar: Scholar, scheme: EraScheme, activity_offset: int = DEFAULT_ACTIVITY_OFFSET
) -> int:
    """Era containing the midpoint of the scholar's active life.

    The first ``activity_offset`` years are skipped; when that leaves no
    active years the whole lifespan is used instead.
    """
    return era_of_year(scheme, active_midpoint(scholar, activity_offset))


def assign_eras(network: InfluenceNetwork, activity_offset: int = DEFAULT_ACTIVITY_OFFSET) -> InfluenceNetwork:
    scheme = network.era_scheme
    return network.with_eras(
        {sid: assign_initial_era(s, scheme, activity_offset) for sid, s in network.scholars.items()}
    )


def find_reverse_links(network: InfluenceNetwork) -> list[InfluenceEdge]:
    """Edges whose source era is later than their target era, most reversed first."""
    if not network.is_assigned:
        raise PreconditionError("every scholar needs an era before looking for reverse links")
    eras = network.era_map
    reverse = [e for e in network.edges if eras[e.source] > eras[e.target]]
    reverse.sort(key=lambda e: (eras[e.target] - eras[e.source], e.source, e.target))
    return reverse


@dataclass(frozen=True)
class Move:
    scholar: str
    direction: str
    from_era: int
    to_era: int
    edge: InfluenceEdge


@dataclass
class ScholarTrace:
    initial_era: int
    final_era: int
    moves: list[str] = field(default_factory=list)

    @property
    def n_moves(self) -> int:
        return len(self.moves)


@dataclass
class AssignmentTrace:
    policy: str
    scholars: dict[str, ScholarTrace]
    steps: list[Move] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.steps)

    def rows(self) -> list[tuple[str, int, int, int]]:
        return [(sid, t.initial_era, t.final_era, t.n_moves) for sid, t in sorted(self.scholars.items())]


def _distance_to_era(year: int, era: int, scheme: EraScheme) -> int:
    """Years ``year`` would have to shift to fall inside ``era`` (0 if already inside)."""
    hi = scheme.upper_bounds[era]
    if year > hi:
        return year - hi
    lo = scheme.lower_bound(era)
    if lo is not None and year <= lo:
        return lo + 1 - year
    return 0


def repair_assignments(
    network: InfluenceNetwork,
    policy: str | PolicyFn = MINIMAL,
    activity_offset: int = DEFAULT_ACTIVITY_OFFSET,
) -> tuple[InfluenceNetwork, AssignmentTrace]:
    """Move scholars between eras until no edge points backward in time.

    Offending edges are handled most-reversed first, ties broken by
    ``(source, target)``. Each step moves one endpoint onto the other's era:
    the source backward or the target forward. ``policy`` picks which:

    ``"backward"`` / ``"forward"``
        Always move that endpoint.
    ``"minimal"`` (default)
        Move the endpoint whose lifespan midpoint lies fewer years outside
        the destination era; ties go backward. A scholar that has moved in
        one direction is never moved the opposite way, except when both
        endpoints are locked against the needed moves, in which case the
        source moves backward and stays backward-locked. Every scholar thus
        moves forward at most ``K-1`` times and then backward at most
        ``K-1`` times, so the loop terminates.
    callable
        ``policy(source, target, eras, network)`` returns ``"backward"`` or
        ``"forward"``; termination is then the caller's concern.

    Raises :class:`NonConvergenceError` past ``|E| * K`` moves.
    """
    if not network.is_assigned:
        raise PreconditionError("assign initial eras before repairing")
    scheme = network.era_scheme
    eras = dict(network.era_map)
    trace = AssignmentTrace(
        policy=policy if isinstance(policy, str) else getattr(policy, "__name__", "custom"),
        scholars={sid: ScholarTrace(e, e) for sid, e in eras.items()},
    )
    if isinstance(policy, str) and policy not in (MINIMAL, BACKWARD, FORWARD):
        raise ValueError(f"unknown repair policy {policy!r}")

    midpoints: dict[str, int] = {}
    locks: dict[str, str] = {}

    def midpoint(sid: str) -> int:
        if sid not in midpoints:
            midpoints[sid] = active_midpoint(network.scholars[sid], activity_offset)
        return midpoints[sid]

    def choose(s: str, t: str) -> str:
        if policy == BACKWARD or policy == FORWARD:
            return policy
        if callable(policy):
            return policy(s, t, eras, network)
        can_back = locks.get(s) != FORWARD
        can_fwd = locks.get(t) != BACKWARD
        if can_back and can_fwd:
            back_cost = _distance_to_era(midpoint(s), eras[t], scheme)
            fwd_cost = _distance_to_era(midpoint(t), eras[s], scheme)
            return BACKWARD if back_cost <= fwd_cost else FORWARD
        return FORWARD if can_fwd else BACKWARD

    succ, pred = network.successors, network.predecessors
    heap = [(eras[t] - eras[s], s, t) for s, t in network.edges if eras[s] > eras[t]]
    heapq.heapify(heap)
    bound = len(network.edges) * len(scheme)

    while heap:
        neg_gap, s, t = heapq.heappop(heap)
        gap = eras[s] - eras[t]
        if gap <= 0:
            continue
        if gap != -neg_gap:
            heapq.heappush(heap, (-gap, s, t))
            continue
        if len(trace.steps) >= bound:
            raise NonConvergenceError(f"era repair exceeded {bound} moves with policy {trace.policy}")
        direction = choose(s, t)
        if direction == BACKWARD:
            mover, dest = s, eras[t]
        elif direction == FORWARD:
            mover, dest = t, eras[s]
        else:
            raise ValueError(f"policy returned {direction!r}")
        move = Move(mover, direction, eras[mover], dest, InfluenceEdge(s, t))
        trace.steps.append(move)
        trace.scholars[mover].moves.append(direction)
        eras[mover] = dest
        locks[mover] = direction
        for nxt in succ.get(mover, ()):
            if eras[mover] > eras[nxt]:
                heapq.heappush(heap, (eras[nxt] - eras[mover], mover, nxt))
        for prv in pred.get(mover, ()):
            if eras[prv] > eras[mover]:
                heapq.heappush(heap, (eras[mover] - eras[prv], prv, mover))

    for sid, st in trace.scholars.items():
        st.final_era = eras[sid]
    if trace.steps:
        logger.info("era repair made %d move(s) affecting %d scholar(s)",
                    len(trace.steps), sum(1 for st in trace.scholars.values() if st.moves))
    return network.with_eras(eras), trace
