"""Reading node/edge files, imputing missing dates, and filtering entities.

Node files carry ``id,label,birth,death`` and edge files ``source,target``;
either may be comma- or tab-delimited (detected from the header line). An
empty field means the value is missing. Years are signed integers with BC
years negative.
"""

from __future__ import annotations

import csv
import fnmatch
import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field, replace
from pathlib import Path

from eranet.errors import ParseError
from eranet.model import DEFAULT_HORIZON, EraScheme, InfluenceEdge, InfluenceNetwork, Scholar

logger = logging.getLogger(__name__)

DEFAULT_IMPUTATION_SPAN = 60
REASON_TAGS = ("concept", "legendary", "band", "other")


@dataclass(frozen=True)
class RawActorRecord:
    id: str
    label: str
    birth_year: int | None = None
    death_year: int | None = None


@dataclass(frozen=True)
class Reject:
    file: str
    line: int
    reason: str
    raw: str = ""


@dataclass
class ParseResult:
    records: list[RawActorRecord]
    edges: list[InfluenceEdge]
    rejects: list[Reject] = field(default_factory=list)
    duplicate_edges: int = 0


@dataclass(frozen=True)
class Unresolved:
    """Actor with neither date known; needs manual completion."""

    record: RawActorRecord


@dataclass(frozen=True)
class FilterRule:
    pattern: str
    reason: str

    def matches(self, actor_id: str) -> bool:
        return fnmatch.fnmatchcase(actor_id, self.pattern)


@dataclass(frozen=True)
class FilterRules:
    rules: tuple[FilterRule, ...] = ()

    def match(self, actor_id: str) -> FilterRule | None:
        for rule in self.rules:
            if rule.matches(actor_id):
                return rule
        return None

    @classmethod
    def load(cls, path: str | Path) -> FilterRules:
        """Read ``<id-or-glob>,<reason>`` lines; blank lines and ``#`` comments are skipped."""
        rules = []
        for lineno, line in enumerate(_read_text(path).splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            pattern, _, reason = line.rpartition(",")
            pattern, reason = pattern.strip(), reason.strip().lower()
            if not pattern:
                pattern, reason = reason, "other"
            if reason not in REASON_TAGS:
                raise ParseError(f"{path}:{lineno}: unknown reason tag {reason!r}")
            rules.append(FilterRule(pattern, reason))
        return cls(tuple(rules))


@dataclass(frozen=True)
class Removal:
    id: str
    reason: str
    pattern: str


@dataclass(frozen=True)
class Correction:
    """A manual data fix: a corrected date, or a flipped edge direction."""

    kind: str  # "birth", "death" or "flip"
    scholar_id: str = ""
    year: int | None = None
    edge: InfluenceEdge | None = None


def _read_text(path: str | Path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8-sig")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc


def _sniff_delimiter(header: str) -> str:
    return "\t" if "\t" in header else ","


def read_table(path: str | Path, columns: Sequence[str]) -> tuple[list[tuple[int, list[str]]], list[str]]:
    """Rows (with 1-based line numbers) of a delimited file whose header must contain ``columns``."""
    text = _read_text(path)
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise ParseError(f"{path}: missing header")
    reader = csv.reader(lines, delimiter=_sniff_delimiter(lines[0]))
    header = [h.strip().lower() for h in next(reader)]
    missing = [c for c in columns if c not in header]
    if missing:
        raise ParseError(f"{path}: header lacks column(s) {', '.join(missing)}")
    rows = [(reader.line_num, row) for row in reader]
    return rows, header


def _parse_year(value: str) -> int | None:
    value = value.strip()
    return int(value) if value else None


def parse_nodes(path: str | Path) -> tuple[list[RawActorRecord], list[Reject]]:
    rows, header = read_table(path, ("id", "label", "birth", "death"))
    col = {name: header.index(name) for name in ("id", "label", "birth", "death")}
    records: list[RawActorRecord] = []
    rejects: list[Reject] = []
    seen: set[str] = set()
    for lineno, row in rows:
        if not any(cell.strip() for cell in row):
            continue
        raw = ",".join(row)
        if len(row) < len(header):
            rejects.append(Reject(str(path), lineno, "wrong field count", raw))
            continue
        actor_id = row[col["id"]].strip()
        if not actor_id:
            rejects.append(Reject(str(path), lineno, "empty id", raw))
            continue
        if actor_id in seen:
            rejects.append(Reject(str(path), lineno, f"duplicate id {actor_id}", raw))
            continue
        try:
            birth = _parse_year(row[col["birth"]])
            death = _parse_year(row[col["death"]])
        except ValueError:
            rejects.append(Reject(str(path), lineno, "non-integer year", raw))
            continue
        seen.add(actor_id)
        records.append(RawActorRecord(actor_id, row[col["label"]].strip(), birth, death))
    return records, rejects


def parse_edges(path: str | Path) -> tuple[list[InfluenceEdge], list[Reject], int]:
    """Edges in file order with duplicates removed; also returns the duplicate count."""
    rows, header = read_table(path, ("source", "target"))
    si, ti = header.index("source"), header.index("target")
    edges: list[InfluenceEdge] = []
    rejects: list[Reject] = []
    seen: set[InfluenceEdge] = set()
    duplicates = 0
    for lineno, row in rows:
        if not any(cell.strip() for cell in row):
            continue
        raw = ",".join(row)
        if len(row) < len(header):
            rejects.append(Reject(str(path), lineno, "wrong field count", raw))
            continue
        source, target = row[si].strip(), row[ti].strip()
        if not source or not target:
            rejects.append(Reject(str(path), lineno, "empty endpoint", raw))
            continue
        if source == target:
            rejects.append(Reject(str(path), lineno, f"self-loop at {source}", raw))
            continue
        edge = InfluenceEdge(source, target)
        if edge in seen:
            duplicates += 1
            continue
        seen.add(edge)
        edges.append(edge)
    if duplicates:
        logger.warning("%s: dropped %d duplicate edge(s)", path, duplicates)
    return edges, rejects, duplicates


def parse_inputs(node_file: str | Path, edge_file: str | Path) -> ParseResult:
    records, node_rejects = parse_nodes(node_file)
    edges, edge_rejects, duplicates = parse_edges(edge_file)
    return ParseResult(records, edges, node_rejects + edge_rejects, duplicates)


def impute_dates(
    record: RawActorRecord,
    horizon: int = DEFAULT_HORIZON,
    span: int = DEFAULT_IMPUTATION_SPAN,
) -> Scholar | Unresolved:
    """Fill a missing birth or death year from the other one.

    A missing birth is ``death - span``; a missing death is ``birth + span``
    capped at ``horizon``. With both years missing there is nothing to
    impute from and an :class:`Unresolved` marker is returned instead.
    """
    birth, death = record.birth_year, record.death_year
    if birth is None and death is None:
        return Unresolved(record)
    birth_imputed = death_imputed = False
    if birth is None:
        birth = death - span
        birth_imputed = True
    elif death is None:
        death = min(birth + span, horizon)
        death_imputed = True
    return Scholar(record.id, record.label, birth, death, birth_imputed, death_imputed)


def apply_filters(
    records: Sequence[RawActorRecord],
    rules: FilterRules,
    edges: Iterable[InfluenceEdge] = (),
) -> tuple[list[RawActorRecord], list[InfluenceEdge], list[Removal]]:
    """Drop records matched by ``rules`` and every edge touching a dropped id."""
    kept: list[RawActorRecord] = []
    removed: list[Removal] = []
    for rec in records:
        rule = rules.match(rec.id)
        if rule is None:
            kept.append(rec)
        else:
            removed.append(Removal(rec.id, rule.reason, rule.pattern))
    gone = {r.id for r in removed}
    kept_edges = [e for e in edges if e.source not in gone and e.target not in gone]
    return kept, kept_edges, removed


def load_corrections(path: str | Path) -> list[Correction]:
    """Read ``<id>,birth|death,<year>`` and ``flip,<source>,<target>`` lines."""
    out: list[Correction] = []
    for lineno, line in enumerate(_read_text(path).splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 3:
            raise ParseError(f"{path}:{lineno}: expected 3 fields")
        if parts[0] == "flip":
            out.append(Correction("flip", edge=InfluenceEdge(parts[1], parts[2])))
        elif parts[1] in ("birth", "death"):
            try:
                out.append(Correction(parts[1], scholar_id=parts[0], year=int(parts[2])))
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: bad year {parts[2]!r}") from exc
        else:
            raise ParseError(f"{path}:{lineno}: unknown correction {parts[1]!r}")
    return out


def apply_corrections(
    records: Sequence[RawActorRecord],
    edges: Sequence[InfluenceEdge],
    corrections: Iterable[Correction],
) -> tuple[list[RawActorRecord], list[InfluenceEdge]]:
    by_id = {r.id: r for r in records}
    edge_list = list(edges)
    for c in corrections:
        if c.kind == "flip":
            assert c.edge is not None
            flipped = InfluenceEdge(c.edge.target, c.edge.source)
            edge_list = [flipped if e == c.edge else e for e in edge_list]
        elif c.scholar_id in by_id:
            field_name = "birth_year" if c.kind == "birth" else "death_year"
            by_id[c.scholar_id] = replace(by_id[c.scholar_id], **{field_name: c.year})
        else:
            logger.warning("correction for unknown scholar %s ignored", c.scholar_id)
    # a flip may collide with an existing reverse edge
    deduped = list(dict.fromkeys(edge_list))
    return [by_id[r.id] for r in records], deduped


@dataclass
class IngestReport:
    rejects: list[Reject] = field(default_factory=list)
    duplicate_edges: int = 0
    unresolved: list[RawActorRecord] = field(default_factory=list)
    removals: list[Removal] = field(default_factory=list)
    dropped_edges: int = 0


def build_network(
    records: Sequence[RawActorRecord],
    edges: Sequence[InfluenceEdge],
    scheme: EraScheme,
    horizon: int = DEFAULT_HORIZON,
    span: int = DEFAULT_IMPUTATION_SPAN,
    rules: FilterRules | None = None,
    corrections: Iterable[Correction] = (),
    report: IngestReport | None = None,
) -> InfluenceNetwork:
    """Run correction, filtering and imputation, producing an unassigned network.

    Unresolved actors are left out of the network, and so are edges that
    touch them; both are recorded in ``report``. Edges naming ids absent
    from the node file are kept so validation can flag them.
    """
    report = report if report is not None else IngestReport()
    records, edges = apply_corrections(records, edges, corrections)
    if rules is not None:
        records, kept, removals = apply_filters(records, rules, edges)
        report.removals.extend(removals)
        report.dropped_edges += len(edges) - len(kept)
        edges = kept
    scholars: dict[str, Scholar] = {}
    unresolved: set[str] = set()
    for rec in records:
        result = impute_dates(rec, horizon, span)
        if isinstance(result, Unresolved):
            report.unresolved.append(rec)
            unresolved.add(rec.id)
        else:
            scholars[rec.id] = result
    kept_edges = [e for e in edges if e.source not in unresolved and e.target not in unresolved]
    report.dropped_edges += len(edges) - len(kept_edges)
    return InfluenceNetwork(scholars, tuple(kept_edges), scheme, horizon)
