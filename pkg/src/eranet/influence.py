"""Influence signatures, longitudinal influence power, and influence patterns."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from eranet.chronology import find_reverse_links
from eranet.errors import PreconditionError
from eranet.model import InfluenceNetwork

MARK = "X"
BLANK = "0"


@dataclass(frozen=True)
class InfluenceSignature:
    """Out-link counts towards each era, starting at the scholar's own."""

    scholar_id: str
    own_era: int
    values: tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.values)


@dataclass(frozen=True)
class InfluencePattern:
    own_era: int
    marks: tuple[str, ...]

    def __str__(self) -> str:
        return "[" + ",".join(self.marks) + "]"


def signature(network: InfluenceNetwork, scholar_id: str) -> InfluenceSignature:
    if scholar_id not in network.scholars:
        raise KeyError(f"unknown scholar {scholar_id}")
    eras = network.era_map
    own = eras[scholar_id]
    values = [0] * (len(network.era_scheme) - own)
    for target in network.successors.get(scholar_id, ()):
        offset = eras[target] - own
        if offset < 0:
            raise PreconditionError(f"reverse era link {scholar_id}->{target}; repair the network first")
        values[offset] += 1
    return InfluenceSignature(scholar_id, own, tuple(values))


def all_signatures(network: InfluenceNetwork) -> list[InfluenceSignature]:
    if find_reverse_links(network):
        raise PreconditionError("network still has reverse era links; repair it first")
    return [signature(network, sid) for sid in sorted(network.scholars)]


def influence_power(sig: InfluenceSignature) -> float:
    """Mean of the signature over every era from the scholar's own to the last."""
    if not sig.values:
        return 0.0
    return sum(sig.values) / len(sig.values)


def pattern(sig: InfluenceSignature) -> InfluencePattern:
    return InfluencePattern(sig.own_era, tuple(MARK if v > 0 else BLANK for v in sig.values))


def pattern_frequencies(network: InfluenceNetwork, era: int) -> list[tuple[InfluencePattern, int, float]]:
    """Share of each influence pattern among an era's scholars that influence anyone.

    Scholars without out-links are left out of the denominator. Sorted by
    share descending, then by pattern marks.
    """
    sigs = [s for s in all_signatures(network) if s.own_era == era and s.total > 0]
    counts = Counter(pattern(s) for s in sigs)
    n = len(sigs)
    rows = [(p, c, c / n) for p, c in counts.items()]
    rows.sort(key=lambda r: (-r[1], r[0].marks))
    return rows
