"""Domain types: era schemes, scholars, and the influence network.

All types here are immutable. Derived networks (e.g. after era assignment)
are built with :meth:`InfluenceNetwork.with_eras` rather than by mutation.
"""

from __future__ import annotations

import bisect
import logging
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Any, NamedTuple

import yaml

from eranet.errors import OutOfRangeError, SchemeError

logger = logging.getLogger(__name__)

DEFAULT_HORIZON = 2020


@dataclass(frozen=True)
class Era:
    name: str
    upper_bound_year: int


@dataclass(frozen=True)
class EraScheme:
    """Ordered, contiguous periodization of history.

    Era ``i`` covers the half-open year interval
    ``(upper_bound[i-1], upper_bound[i]]``; the first era is unbounded below.
    """

    eras: tuple[Era, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "eras", tuple(self.eras))
        if len(self.eras) < 2:
            raise SchemeError("an era scheme needs at least 2 eras")
        bounds = [e.upper_bound_year for e in self.eras]
        for prev, cur in zip(bounds, bounds[1:]):
            if cur <= prev:
                raise SchemeError(f"upper bounds must strictly increase, got {prev} then {cur}")
        names = [e.name for e in self.eras]
        if len(set(names)) != len(names):
            raise SchemeError("era names must be unique")

    def __len__(self) -> int:
        return len(self.eras)

    @property
    def names(self) -> list[str]:
        return [e.name for e in self.eras]

    @cached_property
    def upper_bounds(self) -> tuple[int, ...]:
        return tuple(e.upper_bound_year for e in self.eras)

    def lower_bound(self, index: int) -> int | None:
        """Exclusive lower bound of era ``index``; None for the first era."""
        return None if index == 0 else self.upper_bounds[index - 1]

    def index_of(self, name: str) -> int:
        return self.names.index(name)

    @classmethod
    def from_records(cls, records: Iterable[Mapping[str, Any]]) -> EraScheme:
        try:
            return cls(tuple(Era(str(r["name"]), int(r["upper_bound_year"])) for r in records))
        except (KeyError, TypeError) as exc:
            raise SchemeError(f"era record needs name and upper_bound_year: {exc}") from exc

    @classmethod
    def load(cls, path: str | Path) -> EraScheme:
        """Load a scheme from a YAML or JSON file.

        The file holds either a bare list of ``{name, upper_bound_year}``
        records or a mapping with an ``eras`` key containing that list.
        """
        data = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
        if isinstance(data, Mapping):
            data = data.get("eras")
        if not isinstance(data, list):
            raise SchemeError(f"{path}: expected a list of eras")
        return cls.from_records(data)

    def to_records(self) -> list[dict[str, Any]]:
        return [{"name": e.name, "upper_bound_year": e.upper_bound_year} for e in self.eras]


def default_scheme() -> EraScheme:
    """Osterhammel's six-era global periodization."""
    return EraScheme(
        (
            Era("Antiquity", 600),
            Era("MiddleAges", 1350),
            Era("EarlyModern", 1760),
            Era("Transition", 1870),
            Era("ModernAge", 1945),
            Era("Contemporary", 2020),
        )
    )


def era_of_year(scheme: EraScheme, year: int) -> int:
    """Index of the era containing ``year``; boundary years belong to the earlier era."""
    i = bisect.bisect_left(scheme.upper_bounds, year)
    if i == len(scheme.eras):
        raise OutOfRangeError(
            f"year {year} is after the last era ({scheme.eras[-1].name}, ends {scheme.upper_bounds[-1]})"
        )
    return i


@dataclass(frozen=True)
class Scholar:
    id: str
    label: str
    birth_year: int
    death_year: int
    birth_imputed: bool = False
    death_imputed: bool = False
    era_index: int | None = None


class InfluenceEdge(NamedTuple):
    source: str
    target: str


@dataclass(frozen=True)
class InfluenceNetwork:
    """Directed simple graph of influence links among scholars.

    Parallel edges are collapsed on construction (with a warning). Self-loops
    and dangling endpoints are kept so that :func:`validate_network` can
    report them; ingest rejects them before a network is normally built.
    """

    scholars: Mapping[str, Scholar]
    edges: tuple[InfluenceEdge, ...]
    era_scheme: EraScheme = field(default_factory=default_scheme)
    horizon: int = DEFAULT_HORIZON

    def __post_init__(self) -> None:
        object.__setattr__(self, "scholars", dict(self.scholars))
        raw = [InfluenceEdge(*e) for e in self.edges]
        unique = sorted(set(raw))
        if len(unique) != len(raw):
            logger.warning("dropped %d parallel edge(s)", len(raw) - len(unique))
        object.__setattr__(self, "edges", tuple(unique))

    def __len__(self) -> int:
        return len(self.scholars)

    @cached_property
    def edge_set(self) -> frozenset[InfluenceEdge]:
        return frozenset(self.edges)

    @cached_property
    def successors(self) -> dict[str, list[str]]:
        succ: dict[str, list[str]] = {sid: [] for sid in self.scholars}
        for s, t in self.edges:
            succ.setdefault(s, []).append(t)
        return succ

    @cached_property
    def predecessors(self) -> dict[str, list[str]]:
        pred: dict[str, list[str]] = {sid: [] for sid in self.scholars}
        for s, t in self.edges:
            pred.setdefault(t, []).append(s)
        return pred

    @property
    def is_assigned(self) -> bool:
        return all(s.era_index is not None for s in self.scholars.values())

    def era(self, scholar_id: str) -> int:
        idx = self.scholars[scholar_id].era_index
        if idx is None:
            raise KeyError(f"scholar {scholar_id} has no era assigned")
        return idx

    @cached_property
    def era_map(self) -> dict[str, int]:
        return {sid: s.era_index for sid, s in self.scholars.items() if s.era_index is not None}

    def era_members(self, era: int) -> list[str]:
        return sorted(sid for sid, e in self.era_map.items() if e == era)

    def with_eras(self, eras: Mapping[str, int]) -> InfluenceNetwork:
        """Copy of the network with era indices replaced for the given scholars."""
        scholars = {}
        for sid, s in self.scholars.items():
            era = eras.get(sid, s.era_index)
            if era != s.era_index:
                s = Scholar(s.id, s.label, s.birth_year, s.death_year, s.birth_imputed, s.death_imputed, era)
            scholars[sid] = s
        # same ids and edges: skip edge normalization and keep adjacency caches
        net = object.__new__(InfluenceNetwork)
        for name, value in (("scholars", scholars), ("edges", self.edges),
                            ("era_scheme", self.era_scheme), ("horizon", self.horizon)):
            object.__setattr__(net, name, value)
        for cached in ("edge_set", "successors", "predecessors"):
            if cached in self.__dict__:
                net.__dict__[cached] = self.__dict__[cached]
        return net

    def with_edges(self, edges: Iterable[InfluenceEdge]) -> InfluenceNetwork:
        return InfluenceNetwork(self.scholars, tuple(edges), self.era_scheme, self.horizon)


@dataclass(frozen=True)
class Violation:
    entity: str
    rule: str
    message: str

    def __str__(self) -> str:
        return self.message


def validate_network(network: InfluenceNetwork, check_era_order: bool = True) -> list[Violation]:
    """Check every invariant of the network and its scholars.

    Returns one :class:`Violation` per broken rule; an empty list means the
    network is valid. ``check_era_order`` additionally flags edges pointing
    from a later era to an earlier one, which is only forbidden after repair.
    """
    report: list[Violation] = []
    k = len(network.era_scheme)
    for sid in sorted(network.scholars):
        s = network.scholars[sid]
        if s.birth_year > s.death_year:
            report.append(Violation(sid, "lifespan", f"birth after death at {sid}"))
        elif s.birth_year == s.death_year:
            report.append(Violation(sid, "lifespan", f"zero-length lifespan at {sid}"))
        if s.death_year > network.horizon:
            report.append(
                Violation(sid, "horizon", f"death {s.death_year} after horizon {network.horizon} at {sid}")
            )
        if s.era_index is not None and not 0 <= s.era_index < k:
            report.append(Violation(sid, "era_index", f"invalid era index {s.era_index} at {sid}"))

    for s, t in network.edges:
        name = f"{s}->{t}"
        if s == t:
            report.append(Violation(name, "self_loop", f"self-loop at {s}"))
        missing = [x for x in (s, t) if x not in network.scholars]
        for x in missing:
            report.append(Violation(name, "dangling", f"unknown scholar {x} in edge {name}"))
        if check_era_order and not missing:
            es, et = network.scholars[s].era_index, network.scholars[t].era_index
            if es is not None and et is not None and es > et:
                report.append(Violation(name, "era_order", f"reverse era link {name} ({es} > {et})"))
    return report
