"""End-to-end batch run: ingest -> chronology -> slicing -> metrics -> influence -> brokerage -> community."""

from __future__ import annotations

import hashlib
import logging
import time
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from eranet import __version__, export
from eranet.brokerage import HELD_ROLES, brokerage_scores, role_count_distribution, top_brokers
from eranet.chronology import assign_eras, find_reverse_links, repair_assignments
from eranet.community import (
    TrackingConfig,
    community_stats,
    detect_communities,
    diversity,
    era_presence_patterns,
    theta_sweep,
    track,
)
from eranet.config import PipelineConfig, load_config
from eranet.errors import (
    ConfigError,
    DataValidationError,
    EranetError,
    FetchError,
    InvalidSliceError,
    InvariantError,
    NonConvergenceError,
    OutOfRangeError,
    ParseError,
    PreconditionError,
    SchemeError,
)
from eranet.influence import all_signatures, influence_power, pattern_frequencies
from eranet.ingest import FilterRules, IngestReport, build_network, load_corrections, parse_inputs
from eranet.metrics import bipartite_metrics, top_k_by_degree, unipartite_metrics
from eranet.model import InfluenceNetwork, validate_network
from eranet.slicing import INTER, WITHIN, all_slices, alive_per_year, link_matrix, received_percentages

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_INVARIANT = 4


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, (ConfigError, SchemeError, InvalidSliceError)):
        return EXIT_CONFIG
    if isinstance(exc, (DataValidationError, ParseError, OutOfRangeError, FetchError)):
        return EXIT_DATA
    if isinstance(exc, (InvariantError, NonConvergenceError, PreconditionError)):
        return EXIT_INVARIANT
    return EXIT_FAILURE


def sha256_file(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class RunResult:
    status: int
    manifest: dict[str, Any]
    message: str = ""
    failed_stage: str | None = None


@dataclass
class _Run:
    out: Path
    cfg: PipelineConfig
    threads: int = 1
    outputs: list[Path] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)

    def add(self, path: Path) -> Path:
        self.outputs.append(path)
        return path

    def map(self, fn: Callable, items: list) -> list:
        if self.threads <= 1 or len(items) < 2:
            return [fn(x) for x in items]
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            return list(pool.map(fn, items))


def load_and_validate(nodes: str | Path, edges: str | Path, cfg: PipelineConfig,
                      report: IngestReport | None = None) -> InfluenceNetwork:
    """Parse, correct, filter and impute; raise :class:`DataValidationError` on any violation."""
    report = report if report is not None else IngestReport()
    parsed = parse_inputs(nodes, edges)
    report.rejects.extend(parsed.rejects)
    report.duplicate_edges += parsed.duplicate_edges
    rules = FilterRules.load(cfg.filters) if cfg.filters else None
    corrections = load_corrections(cfg.corrections) if cfg.corrections else ()
    network = build_network(parsed.records, parsed.edges, cfg.scheme, cfg.horizon, cfg.imputation_span,
                            rules, corrections, report)
    violations = validate_network(network, check_era_order=False)
    if violations:
        shown = "; ".join(str(v) for v in violations[:5])
        more = f" (+{len(violations) - 5} more)" if len(violations) > 5 else ""
        raise DataValidationError(f"{len(violations)} validation error(s): {shown}{more}", violations)
    return network


def _stage_ingest(run: _Run, nodes: Path, edges: Path) -> InfluenceNetwork:
    report = IngestReport()
    try:
        network = load_and_validate(nodes, edges, run.cfg, report)
    except DataValidationError as exc:
        export.write_json(run.out / "ingest" / "validation.json",
                          [{"entity": v.entity, "rule": v.rule, "message": v.message} for v in exc.violations])
        raise
    d = run.out / "ingest"
    run.add(export.write_csv(d / "rejects.csv", ("file", "line", "reason", "raw"),
                             [(r.file, r.line, r.reason, r.raw) for r in report.rejects]))
    run.add(export.write_csv(d / "unresolved.csv", ("id", "label", "birth", "death"),
                             [(r.id, r.label, None, None) for r in report.unresolved]))
    run.add(export.write_csv(d / "removals.csv", ("id", "reason", "pattern"),
                             [(r.id, r.reason, r.pattern) for r in report.removals]))
    run.add(export.write_json(d / "validation.json", []))
    run.add(export.write_json(d / "summary.json", {
        "scholars": len(network.scholars),
        "edges": len(network.edges),
        "rejects": len(report.rejects),
        "duplicate_edges": report.duplicate_edges,
        "unresolved": len(report.unresolved),
        "removed": len(report.removals),
        "dropped_edges": report.dropped_edges,
        "imputed_births": sum(s.birth_imputed for s in network.scholars.values()),
        "imputed_deaths": sum(s.death_imputed for s in network.scholars.values()),
    }))
    return network


def _stage_chronology(run: _Run, network: InfluenceNetwork) -> InfluenceNetwork:
    initial = assign_eras(network, run.cfg.activity_offset)
    anomalies = len(find_reverse_links(initial))
    repaired, trace = repair_assignments(initial, run.cfg.repair_policy, run.cfg.activity_offset)
    if find_reverse_links(repaired):
        raise InvariantError("reverse era links remain after repair")
    if len(trace) > len(network.edges) * len(network.era_scheme):
        raise InvariantError("repair exceeded its move bound")
    d = run.out / "chronology"
    run.add(export.write_trace(trace, d / "assignment_trace.csv"))
    run.add(export.write_moves(trace, d / "moves.csv"))
    run.add(export.write_scholars(repaired, d / "scholars.csv"))
    run.add(export.write_edges(repaired.edges, d / "edges.csv"))
    run.add(export.write_json(d / "summary.json", {
        "policy": trace.policy,
        "initial_reverse_links": anomalies,
        "moves": len(trace),
        "scholars_moved": sum(1 for t in trace.scholars.values() if t.moves),
    }))
    return repaired


def _stage_slicing(run: _Run, network: InfluenceNetwork) -> list:
    names = network.era_scheme.names
    d = run.out / "slicing"
    matrix = link_matrix(network)
    if int(matrix.sum()) != len(network.edges) or np.tril(matrix, -1).any():
        raise InvariantError("link matrix is not an upper-triangular partition of the edges")
    run.add(export.write_matrix(matrix, names, d / "link_matrix.csv"))
    shares = received_percentages(matrix)
    run.add(export.write_matrix(shares.fractions, names, d / "received_percentages.csv"))
    if run.cfg.alive_years:
        start, end = run.cfg.alive_years
    else:
        start = min((s.birth_year for s in network.scholars.values()), default=network.horizon)
        end = network.horizon
    years, counts = alive_per_year(network, start, end)
    run.add(export.write_alive(years, counts, names, d / "alive_per_year.csv"))

    slices = all_slices(network)
    partitioned = sorted(e for pn in slices if pn.kind.kind in (WITHIN, INTER) for e in pn.edges)
    if partitioned != sorted(network.edges):
        raise InvariantError("within/inter slices do not partition the edge set")
    if run.cfg.write_dot:
        labels = {sid: s.label for sid, s in network.scholars.items()}
        for pn in slices:
            run.add(export.write_dot(pn, d / "dot" / f"{pn.kind.slug}.dot", labels))
    return slices


def _stage_metrics(run: _Run, network: InfluenceNetwork, slices: list) -> None:
    names = network.era_scheme.names
    d = run.out / "metrics"

    def compute(pn):
        return bipartite_metrics(pn) if pn.kind.kind == INTER else unipartite_metrics(pn)

    results = run.map(compute, slices)
    tables: dict[str, list[dict]] = {"within": [], "inter": [], "accumulated": []}
    top_rows = []
    for pn, m in zip(slices, results):
        era_label = "->".join(names[e] for e in pn.kind.eras)
        run.add(export.write_json(d / "slices" / f"{pn.kind.slug}.json",
                                  {"slice": str(pn.kind), "eras": era_label, **m.to_dict()}))
        tables[pn.kind.kind].append({"slice": str(pn.kind), "eras": era_label, **m.to_dict()})
        for direction in ("out", "in"):
            for rank, (sid, deg) in enumerate(top_k_by_degree(pn, direction, run.cfg.top_k), start=1):
                top_rows.append((str(pn.kind), direction, rank, sid, network.scholars[sid].label, deg))
    for kind, rows in tables.items():
        run.add(export.write_metrics_table(rows, d / f"{kind}_metrics.csv"))
    run.add(export.write_csv(d / "top_degree.csv", ("slice", "direction", "rank", "id", "label", "degree"), top_rows))


def _stage_influence(run: _Run, network: InfluenceNetwork) -> None:
    names = network.era_scheme.names
    d = run.out / "influence"
    sigs = all_signatures(network)
    for sig in sigs:
        if sig.total != len(network.successors[sig.scholar_id]):
            raise InvariantError(f"signature of {sig.scholar_id} does not sum to its out-degree")
    run.add(export.write_signatures(sigs, names, d / "signatures.csv"))
    table = {e: pattern_frequencies(network, e) for e in range(len(names))}
    run.add(export.write_patterns(table, names, d / "patterns.csv"))
    top_rows = []
    for e in range(len(names)):
        ranked = sorted((s for s in sigs if s.own_era == e), key=lambda s: (-influence_power(s), s.scholar_id))
        for rank, sig in enumerate(ranked[: run.cfg.top_k], start=1):
            power = influence_power(sig)
            top_rows.append((names[e], rank, sig.scholar_id, network.scholars[sig.scholar_id].label,
                             power, f"{power:.1f}"))
    run.add(export.write_csv(d / "top_power.csv", ("era", "rank", "id", "label", "power", "power_1dp"), top_rows))


def _stage_brokerage(run: _Run, network: InfluenceNetwork) -> None:
    names = network.era_scheme.names
    d = run.out / "brokerage"
    scores = brokerage_scores(network)
    if any(sc.consultant for sc in scores.values()):
        raise InvariantError("consultant brokerage found in a repaired network")
    run.add(export.write_brokerage(scores, names, d / "brokerage.csv"))
    run.add(export.write_role_distribution(role_count_distribution(scores, len(names)), names,
                                           d / "role_distribution.csv"))
    rows = []
    for role in HELD_ROLES:
        for e in range(len(names)):
            for rank, (sid, count) in enumerate(top_brokers(scores, role, e, run.cfg.top_k), start=1):
                rows.append((role, names[e], rank, sid, network.scholars[sid].label, count))
    run.add(export.write_csv(d / "top_brokers.csv", ("role", "era", "rank", "id", "label", "count"), rows))


def _stage_community(run: _Run, network: InfluenceNetwork, slices: list) -> list:
    names = network.era_scheme.names
    k = len(names)
    d = run.out / "community"
    accumulated = [pn for pn in slices if pn.kind.kind == "accumulated"]
    partitions = run.map(lambda pn: detect_communities(pn, seed=run.cfg.seed), accumulated)
    eras = network.era_map
    stat_rows, div_rows = [], []
    for pn, part in zip(accumulated, partitions):
        run.add(export.write_partition(part, d / "partitions" / f"step_{part.step}.csv"))
        stats = community_stats(part, pn)
        top = stats["top"] + [{"nodes": None, "edges": None}] * (3 - len(stats["top"]))
        stat_rows.append({
            "step": part.step,
            "era": names[part.step],
            "n_communities": stats["n_communities"],
            "n_large": stats["n_large"],
            **{f"lc{i + 1}_{key}": top[i][key] for i in range(3) for key in ("nodes", "edges")},
            **{f"size_{key}": v for key, v in stats["sizes"].items()},
            "modularity": part.modularity_trace[-1] if part.modularity_trace else 0.0,
        })
        for cid, members in part.communities().items():
            div_rows.append((part.step, cid, len(members), diversity([eras[m] for m in members], k)))
    run.add(export.write_records(stat_rows, d / "community_stats.csv"))
    run.add(export.write_csv(d / "community_diversity.csv", ("step", "community", "size", "diversity"), div_rows))

    result = track(partitions, TrackingConfig(run.cfg.theta, run.cfg.death_window))
    run.add(export.write_events(result, d / "events.csv"))
    run.add(export.write_dynamic_communities(result, d / "dynamic_communities.csv"))
    run.add(export.write_presence_patterns(era_presence_patterns(result, k), names, d / "presence_patterns.csv"))
    return partitions


def _stage_sweep(run: _Run, network: InfluenceNetwork, partitions: list) -> None:
    rows = theta_sweep(partitions, run.cfg.sweep_thetas, run.cfg.death_window, network.era_map,
                       len(network.era_scheme))
    run.add(export.write_records(rows, run.out / "community" / "sweep.csv"))


def run_pipeline(
    config_path: str | Path | None,
    nodes: str | Path,
    edges: str | Path,
    output_dir: str | Path,
    threads: int = 1,
    config: PipelineConfig | None = None,
) -> RunResult:
    """Run every stage and write all reports plus ``manifest.json`` into ``output_dir``.

    Never raises for data or config problems: the returned status is 0 on
    success, 2 for config errors, 3 for invalid input data, 4 when an
    internal invariant breaks, and 1 otherwise.
    """
    out = Path(output_dir)
    manifest: dict[str, Any] = {"tool": "eranet", "version": __version__, "status": None}
    stage = "config"
    try:
        cfg = config if config is not None else load_config(config_path)
        if config is not None:
            cfg.validate()
        manifest["config"] = cfg.snapshot()
        inputs = {"nodes": Path(nodes), "edges": Path(edges)}
        if config_path is not None:
            inputs["config"] = Path(config_path)
        for extra in ("filters", "corrections"):
            if getattr(cfg, extra):
                inputs[extra] = Path(getattr(cfg, extra))
        missing = [str(p) for p in inputs.values() if not p.is_file()]
        if missing:
            raise ParseError(f"input file(s) not found: {', '.join(missing)}")
        manifest["inputs"] = {name: {"path": str(p), "sha256": sha256_file(p)} for name, p in inputs.items()}
        out.mkdir(parents=True, exist_ok=True)
        run = _Run(out, cfg, max(1, threads))

        def timed(name: str, fn: Callable, *args):
            nonlocal stage
            stage = name
            started = time.perf_counter()
            value = fn(run, *args)
            run.timings[name] = round(time.perf_counter() - started, 6)
            logger.info("stage %s done in %.2fs", name, run.timings[name])
            return value

        network = timed("ingest", _stage_ingest, inputs["nodes"], inputs["edges"])
        network = timed("chronology", _stage_chronology, network)
        slices = timed("slicing", _stage_slicing, network)
        timed("metrics", _stage_metrics, network, slices)
        timed("influence", _stage_influence, network)
        timed("brokerage", _stage_brokerage, network)
        partitions = timed("community", _stage_community, network, slices)
        if cfg.sweep_thetas:
            timed("sweep", _stage_sweep, network, partitions)
    except (EranetError, OSError, ValueError, AssertionError) as exc:
        status = exit_code_for(exc)
        manifest.update(status=status, failed_stage=stage, error=str(exc))
        if out.is_dir():
            export.write_json(out / "manifest.json", manifest)
        logger.debug("stage %s failed: %s", stage, exc)
        return RunResult(status, manifest, f"stage {stage} failed: {exc}", stage)

    manifest["status"] = EXIT_OK
    manifest["timings"] = run.timings
    manifest["outputs"] = {
        p.relative_to(out).as_posix(): sha256_file(p) for p in sorted(set(run.outputs))
    }
    export.write_json(out / "manifest.json", manifest)
    return RunResult(EXIT_OK, manifest)
