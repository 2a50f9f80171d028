"""File writers for every report the pipeline produces, plus readers for its intermediates.

Floats are written with ``repr`` so reruns are byte-identical and values
round-trip exactly.
"""

from __future__ import annotations

import csv
import json
from collections.abc import Iterable, Mapping, Sequence
from pathlib import Path
from typing import Any

import numpy as np

from eranet.brokerage import HELD_ROLES, BrokerageScores
from eranet.chronology import AssignmentTrace
from eranet.community.detection import CommunityPartition
from eranet.community.tracking import TrackingResult
from eranet.errors import ParseError
from eranet.influence import InfluenceSignature, influence_power
from eranet.ingest import read_table
from eranet.model import EraScheme, InfluenceEdge, InfluenceNetwork, Scholar
from eranet.slicing import PartialNetwork


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, np.integer):
        return str(int(value))
    return str(value)


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
    return path


def write_json(path: str | Path, data: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def write_scholars(network: InfluenceNetwork, path: str | Path) -> Path:
    names = network.era_scheme.names
    rows = []
    for sid in sorted(network.scholars):
        s = network.scholars[sid]
        rows.append((s.id, s.label, s.birth_year, s.death_year, s.birth_imputed, s.death_imputed,
                     None if s.era_index is None else names[s.era_index]))
    return write_csv(path, ("id", "label", "birth", "death", "birth_imputed", "death_imputed", "era"), rows)


def write_edges(edges: Iterable[InfluenceEdge], path: str | Path) -> Path:
    return write_csv(path, ("source", "target"), sorted(edges))


def read_scholars(path: str | Path, scheme: EraScheme) -> dict[str, Scholar]:
    """Read a scholars file that already has complete dates (and optionally an ``era`` column).

    The era may be given by name or by index.
    """
    rows, header = read_table(path, ("id", "label", "birth", "death"))
    col = {h: i for i, h in enumerate(header)}
    out: dict[str, Scholar] = {}
    for lineno, row in rows:
        if not any(c.strip() for c in row):
            continue
        get = lambda name: row[col[name]].strip() if name in col and col[name] < len(row) else ""  # noqa: E731
        try:
            era_text = get("era")
            era = None
            if era_text:
                era = int(era_text) if era_text.lstrip("-").isdigit() else scheme.index_of(era_text)
            out[get("id")] = Scholar(
                get("id"), get("label"), int(get("birth")), int(get("death")),
                get("birth_imputed") == "true", get("death_imputed") == "true", era,
            )
        except ValueError as exc:
            raise ParseError(f"{path}:{lineno}: {exc}") from exc
    return out


def write_trace(trace: AssignmentTrace, path: str | Path) -> Path:
    return write_csv(path, ("id", "initial_era", "final_era", "n_moves"), trace.rows())


def write_moves(trace: AssignmentTrace, path: str | Path) -> Path:
    rows = [(i, m.scholar, m.direction, m.from_era, m.to_era, m.edge.source, m.edge.target)
            for i, m in enumerate(trace.steps)]
    return write_csv(path, ("step", "id", "direction", "from_era", "to_era", "edge_source", "edge_target"), rows)


def write_matrix(matrix: np.ndarray, names: Sequence[str], path: str | Path) -> Path:
    rows = [(names[i], *matrix[i].tolist()) for i in range(len(names))]
    return write_csv(path, ("source_era", *names), rows)


def write_alive(years: np.ndarray, counts: np.ndarray, names: Sequence[str], path: str | Path) -> Path:
    rows = ((int(y), *counts[i].tolist()) for i, y in enumerate(years))
    return write_csv(path, ("year", *names), rows)


def _dot_id(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def write_dot(pn: PartialNetwork, path: str | Path, labels: Mapping[str, str] | None = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"digraph {_dot_id(pn.kind.slug)} {{"]
    for node in sorted(pn.nodes):
        attrs = []
        if labels and node in labels:
            attrs.append(f"label={_dot_id(labels[node])}")
        if pn.sources and node in pn.sources:
            attrs.append("group=source")
        elif pn.targets and node in pn.targets:
            attrs.append("group=target")
        suffix = f" [{', '.join(attrs)}]" if attrs else ""
        lines.append(f"  {_dot_id(node)}{suffix};")
    for s, t in sorted(pn.edges):
        lines.append(f"  {_dot_id(s)} -> {_dot_id(t)};")
    lines.append("}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def write_metrics_table(rows: Sequence[Mapping[str, Any]], path: str | Path) -> Path:
    if not rows:
        return write_csv(path, ("slice",), [])
    header = list(rows[0])
    return write_csv(path, header, ([r[h] for h in header] for r in rows))


def write_signatures(sigs: Sequence[InfluenceSignature], names: Sequence[str], path: str | Path) -> Path:
    k = len(names)
    rows = []
    for sig in sigs:
        cells = [None] * sig.own_era + list(sig.values)
        rows.append((sig.scholar_id, names[sig.own_era], *cells, influence_power(sig)))
    return write_csv(path, ("id", "era", *names[:k], "power"), rows)


def write_patterns(
    table: Mapping[int, Sequence[tuple]], names: Sequence[str], path: str | Path
) -> Path:
    rows = []
    for era, entries in table.items():
        for pat, count, fraction in entries:
            rows.append((names[era], *([None] * era), *pat.marks, count, fraction))
    return write_csv(path, ("era", *names, "count", "fraction"), rows)


def write_brokerage(scores: Mapping[str, BrokerageScores], names: Sequence[str], path: str | Path) -> Path:
    rows = [(sc.scholar_id, names[sc.era], *(sc.count(r) for r in HELD_ROLES))
            for sc in sorted(scores.values(), key=lambda x: x.scholar_id)]
    return write_csv(path, ("id", "era", *HELD_ROLES), rows)


def write_role_distribution(rows: Sequence[Mapping[str, Any]], names: Sequence[str], path: str | Path) -> Path:
    header = ["era", "scholars"] + [f"{p}_{n}" for n in range(1, 5) for p in ("roles", "fraction")]
    out = []
    for r in rows:
        era = "overall" if r["era"] is None else names[r["era"]]
        out.append([era, r["scholars"], *(r[h] for h in header[2:])])
    return write_csv(path, header, out)


def write_partition(partition: CommunityPartition, path: str | Path) -> Path:
    return write_csv(path, ("node_id", "community_id"), sorted(partition.assignment.items()))


def read_partition(path: str | Path, step: int) -> CommunityPartition:
    rows, header = read_table(path, ("node_id", "community_id"))
    ni, ci = header.index("node_id"), header.index("community_id")
    try:
        assignment = {row[ni].strip(): int(row[ci]) for _, row in rows if row and row[ni].strip()}
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    return CommunityPartition(step, assignment)


def write_events(result: TrackingResult, path: str | Path) -> Path:
    rows = [(e.step, e.event, ";".join(map(str, e.dynamic_ids)), e.step_community) for e in result.events]
    return write_csv(path, ("step", "event", "dynamic_ids", "step_community_id"), rows)


def write_dynamic_communities(result: TrackingResult, path: str | Path) -> Path:
    rows = []
    for dc in result.communities:
        timeline = ";".join(f"{s}:{c}" for s, c in dc.timeline)
        rows.append((dc.id, timeline, len(result.members(dc)), dc.dead, dc.merged, dc.parent))
    return write_csv(path, ("id", "timeline", "members", "dead", "merged", "parent"), rows)


def flatten(row: Mapping[str, Any], prefix: str = "") -> dict[str, Any]:
    out: dict[str, Any] = {}
    for k, v in row.items():
        if isinstance(v, Mapping):
            out.update(flatten(v, f"{prefix}{k}_"))
        else:
            out[f"{prefix}{k}"] = v
    return out


def write_records(rows: Sequence[Mapping[str, Any]], path: str | Path) -> Path:
    flat = [flatten(r) for r in rows]
    header = list(flat[0]) if flat else []
    return write_csv(path, header, ([r.get(h) for h in header] for r in flat))


def write_presence_patterns(rows: Sequence[Mapping[str, Any]], names: Sequence[str], path: str | Path) -> Path:
    out = [(*("X" if m else "" for m in r["pattern"]), r["count"], r["avg_size"]) for r in rows]
    return write_csv(path, (*names, "count", "avg_size"), out)

