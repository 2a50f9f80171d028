"""Time-sliced projections of a repaired network and era-level link statistics."""

from __future__ import annotations

import re
from collections.abc import Iterator
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

from eranet.chronology import find_reverse_links
from eranet.errors import InvalidSliceError, PreconditionError
from eranet.model import InfluenceEdge, InfluenceNetwork

WITHIN = "within"
INTER = "inter"
ACCUMULATED = "accumulated"


@dataclass(frozen=True)
class SliceKind:
    kind: str
    eras: tuple[int, ...]

    def __post_init__(self) -> None:
        expected = 2 if self.kind == INTER else 1
        if self.kind not in (WITHIN, INTER, ACCUMULATED) or len(self.eras) != expected:
            raise InvalidSliceError(f"malformed slice kind {self.kind}{self.eras}")
        if any(e < 0 for e in self.eras):
            raise InvalidSliceError(f"negative era in slice {self}")
        if self.kind == INTER and self.eras[0] >= self.eras[1]:
            raise InvalidSliceError(f"inter-era slice needs source < target, got {self.eras}")

    @classmethod
    def within(cls, era: int) -> SliceKind:
        return cls(WITHIN, (era,))

    @classmethod
    def inter(cls, source: int, target: int) -> SliceKind:
        return cls(INTER, (source, target))

    @classmethod
    def accumulated(cls, era: int) -> SliceKind:
        return cls(ACCUMULATED, (era,))

    @classmethod
    def parse(cls, text: str) -> SliceKind:
        """Parse ``within:E``, ``inter:S:T`` or ``accumulated:E``."""
        m = re.fullmatch(r"\s*(within|inter|accumulated)((?::\d+)+)\s*", text)
        if not m:
            raise InvalidSliceError(f"cannot parse slice {text!r}")
        return cls(m.group(1), tuple(int(x) for x in m.group(2)[1:].split(":")))

    def __str__(self) -> str:
        return ":".join([self.kind, *map(str, self.eras)])

    @property
    def slug(self) -> str:
        return "_".join([self.kind, *map(str, self.eras)])


@dataclass(frozen=True)
class PartialNetwork:
    """A within-era, inter-era or accumulated-era projection.

    ``population`` is the number of scholars the slice is drawn from: the
    era's membership for within-era slices (the ``A`` in the participation
    ratio N/A) and the node count otherwise.
    """

    kind: SliceKind
    nodes: frozenset[str]
    edges: tuple[InfluenceEdge, ...]
    sources: frozenset[str] = frozenset()
    targets: frozenset[str] = frozenset()
    population: int = 0

    @cached_property
    def edge_set(self) -> frozenset[InfluenceEdge]:
        return frozenset(self.edges)

    def out_degrees(self) -> dict[str, int]:
        deg = dict.fromkeys(self.nodes, 0)
        for s, _ in self.edges:
            deg[s] += 1
        return deg

    def in_degrees(self) -> dict[str, int]:
        deg = dict.fromkeys(self.nodes, 0)
        for _, t in self.edges:
            deg[t] += 1
        return deg


def _require_repaired(network: InfluenceNetwork) -> None:
    if find_reverse_links(network):
        raise PreconditionError("network still has reverse era links; repair it first")


def slice_network(network: InfluenceNetwork, kind: SliceKind | str, check: bool = True) -> PartialNetwork:
    if isinstance(kind, str):
        kind = SliceKind.parse(kind)
    k = len(network.era_scheme)
    if any(e >= k for e in kind.eras):
        raise InvalidSliceError(f"slice {kind} refers to an era beyond {k - 1}")
    if check:
        _require_repaired(network)
    eras = network.era_map

    if kind.kind == WITHIN:
        (e,) = kind.eras
        edges = tuple(x for x in network.edges if eras[x.source] == e and eras[x.target] == e)
        nodes = frozenset(n for x in edges for n in x)
        population = sum(1 for v in eras.values() if v == e)
        return PartialNetwork(kind, nodes, edges, population=population)

    if kind.kind == INTER:
        s_era, t_era = kind.eras
        edges = tuple(x for x in network.edges if eras[x.source] == s_era and eras[x.target] == t_era)
        sources = frozenset(x.source for x in edges)
        targets = frozenset(x.target for x in edges)
        return PartialNetwork(kind, sources | targets, edges, sources, targets, len(sources) + len(targets))

    (e,) = kind.eras
    nodes = frozenset(sid for sid, v in eras.items() if v <= e)
    edges = tuple(x for x in network.edges if eras[x.source] <= e and eras[x.target] <= e)
    return PartialNetwork(kind, nodes, edges, population=len(nodes))


def all_slice_kinds(n_eras: int) -> Iterator[SliceKind]:
    """Every within-era, inter-era and accumulated-era slice, in that order."""
    for e in range(n_eras):
        yield SliceKind.within(e)
    for s in range(n_eras):
        for t in range(s + 1, n_eras):
            yield SliceKind.inter(s, t)
    for e in range(n_eras):
        yield SliceKind.accumulated(e)


def all_slices(network: InfluenceNetwork) -> list[PartialNetwork]:
    _require_repaired(network)
    return [slice_network(network, kind, check=False) for kind in all_slice_kinds(len(network.era_scheme))]


def link_matrix(network: InfluenceNetwork) -> np.ndarray:
    """``counts[s, t]`` = number of edges from era ``s`` to era ``t``."""
    _require_repaired(network)
    k = len(network.era_scheme)
    counts = np.zeros((k, k), dtype=np.int64)
    eras = network.era_map
    for s, t in network.edges:
        counts[eras[s], eras[t]] += 1
    return counts


class ReceivedShares(NamedTuple):
    fractions: np.ndarray
    empty_columns: list[int]


def received_percentages(matrix: np.ndarray) -> ReceivedShares:
    """Column-normalize a link matrix; columns with no incoming links stay zero and are flagged."""
    counts = np.asarray(matrix, dtype=float)
    totals = counts.sum(axis=0)
    empty = [int(i) for i in np.flatnonzero(totals == 0)]
    fractions = np.divide(counts, totals, out=np.zeros_like(counts), where=totals > 0)
    return ReceivedShares(fractions, empty)


def alive_per_year(network: InfluenceNetwork, start: int, end: int) -> tuple[np.ndarray, np.ndarray]:
    """Scholars alive in each year of ``[start, end]``, grouped by assigned era.

    Returns ``(years, counts)`` where ``counts[i, e]`` is the number of
    scholars of era ``e`` with ``birth <= years[i] <= death``.
    """
    if end < start:
        raise ValueError("end year precedes start year")
    k = len(network.era_scheme)
    n = end - start + 1
    diff = np.zeros((n + 1, k), dtype=np.int64)
    for s in network.scholars.values():
        if s.era_index is None:
            continue
        lo, hi = max(s.birth_year, start), min(s.death_year, end)
        if lo > hi:
            continue
        diff[lo - start, s.era_index] += 1
        diff[hi - start + 1, s.era_index] -= 1
    return np.arange(start, end + 1), np.cumsum(diff[:-1], axis=0)
