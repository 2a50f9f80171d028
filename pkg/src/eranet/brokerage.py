"""Gould-Fernandez brokerage roles with eras as the group partition.

For every non-transitive two-path A->B->C (A != C, no edge A->C) the middle
node B earns one count of the role determined by the eras of A, B and C.
On a repaired network eras never decrease along an edge, so the consultant
role (A and C in one era, B in another) cannot occur.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass

from eranet.chronology import find_reverse_links
from eranet.errors import PreconditionError
from eranet.model import InfluenceNetwork

ROLES = ("coordinator", "gatekeeper", "representative", "liaison", "consultant")
HELD_ROLES = ROLES[:4]


@dataclass
class BrokerageScores:
    scholar_id: str
    era: int
    coordinator: int = 0
    gatekeeper: int = 0
    representative: int = 0
    liaison: int = 0
    consultant: int = 0

    def count(self, role: str) -> int:
        return getattr(self, role)

    @property
    def roles_held(self) -> int:
        return sum(1 for r in ROLES if getattr(self, r) > 0)

    @property
    def total(self) -> int:
        return sum(getattr(self, r) for r in ROLES)


def classify(era_a: int, era_b: int, era_c: int) -> str:
    if era_a == era_b == era_c:
        return "coordinator"
    if era_a == era_c:
        return "consultant"
    if era_a < era_b == era_c:
        return "gatekeeper"
    if era_a == era_b < era_c:
        return "representative"
    if era_a < era_b < era_c:
        return "liaison"
    raise PreconditionError(f"era order {era_a}, {era_b}, {era_c} has no role in a repaired network")


def brokerage_scores(network: InfluenceNetwork) -> dict[str, BrokerageScores]:
    if find_reverse_links(network):
        raise PreconditionError("network still has reverse era links; repair it first")
    eras = network.era_map
    succ = {sid: set(ts) for sid, ts in network.successors.items()}
    pred = network.predecessors
    scores: dict[str, BrokerageScores] = {}
    for b in sorted(network.scholars):
        sb = BrokerageScores(b, eras[b])
        eb = eras[b]
        outs = succ.get(b, ())
        if outs:
            for a in pred.get(b, ()):
                ea, sa = eras[a], succ[a]
                for c in outs:
                    if c == a or c in sa:
                        continue
                    role = classify(ea, eb, eras[c])
                    setattr(sb, role, getattr(sb, role) + 1)
        scores[b] = sb
    return scores


def role_count_distribution(
    scores: Mapping[str, BrokerageScores], n_eras: int
) -> list[dict[str, object]]:
    """Per era: how many scholars hold exactly 1, 2, 3 or 4 distinct roles.

    Fractions are over every scholar of the era. The last row (era ``None``)
    aggregates all eras.
    """
    population = [0] * n_eras
    counts = [[0] * 5 for _ in range(n_eras)]
    for sc in scores.values():
        population[sc.era] += 1
        counts[sc.era][min(sc.roles_held, 4)] += 1
    rows: list[dict[str, object]] = []
    for e in range(n_eras):
        rows.append(_row(e, population[e], counts[e]))
    rows.append(_row(None, sum(population), [sum(c[i] for c in counts) for i in range(5)]))
    return rows


def _row(era: int | None, population: int, counts: list[int]) -> dict[str, object]:
    row: dict[str, object] = {"era": era, "scholars": population}
    for n_roles in range(1, 5):
        row[f"roles_{n_roles}"] = counts[n_roles]
        row[f"fraction_{n_roles}"] = counts[n_roles] / population if population else 0.0
    return row


def top_brokers(
    scores: Mapping[str, BrokerageScores], role: str, era: int, k: int = 5
) -> list[tuple[str, int]]:
    if role not in ROLES:
        raise ValueError(f"unknown role {role!r}")
    if k < 1:
        raise ValueError("k must be at least 1")
    ranked = [(sid, sc.count(role)) for sid, sc in scores.items() if sc.era == era and sc.count(role) > 0]
    ranked.sort(key=lambda kv: (-kv[1], kv[0]))
    return ranked[:k]
