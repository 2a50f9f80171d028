"""Command-line front end.

``eranet run`` executes the whole pipeline. The other subcommands run one
stage each on files written by an earlier stage, e.g.::

    eranet assign-eras --nodes nodes.csv --edges edges.csv --output out/
    eranet metrics --scholars out/scholars.csv --edges out/edges.csv --slice within:0
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import re
import sys
from pathlib import Path

from eranet import __version__, export
from eranet.brokerage import brokerage_scores, role_count_distribution
from eranet.chronology import assign_eras, repair_assignments
from eranet.community import (
    TrackingConfig,
    detect_communities,
    era_presence_patterns,
    theta_sweep,
    track,
)
from eranet.config import DEFAULT_SWEEP, PipelineConfig, load_config, parse_thetas
from eranet.errors import ConfigError, EranetError, PreconditionError
from eranet.influence import all_signatures, pattern_frequencies
from eranet.ingest import IngestReport, parse_edges
from eranet.metrics import bipartite_metrics, unipartite_metrics
from eranet.model import InfluenceNetwork
from eranet.pipeline import exit_code_for, load_and_validate, run_pipeline
from eranet.slicing import INTER, SliceKind, all_slices, link_matrix, received_percentages, slice_network
from eranet.sparql import ENDPOINT_ENV, fetch_sparql

logger = logging.getLogger("eranet")


def _config(args: argparse.Namespace) -> PipelineConfig:
    return load_config(getattr(args, "config", None))


def _repaired_network(args: argparse.Namespace) -> InfluenceNetwork:
    cfg = _config(args)
    scheme = cfg.scheme
    scholars = export.read_scholars(args.scholars, scheme)
    edges, rejects, _ = parse_edges(args.edges)
    for r in rejects:
        logger.warning("%s:%d: %s", r.file, r.line, r.reason)
    network = InfluenceNetwork(scholars, tuple(edges), scheme, cfg.horizon)
    if not network.is_assigned:
        raise PreconditionError(f"{args.scholars} has scholars without an era; run assign-eras first")
    return network


def _out(args: argparse.Namespace) -> Path:
    path = Path(args.output)
    path.mkdir(parents=True, exist_ok=True)
    return path


def cmd_validate(args: argparse.Namespace) -> int:
    report = IngestReport()
    network = load_and_validate(args.nodes, args.edges, _config(args), report)
    for r in report.rejects:
        print(f"reject {r.file}:{r.line}: {r.reason}", file=sys.stderr)
    print(f"ok: {len(network.scholars)} scholars, {len(network.edges)} edges, "
          f"{len(report.rejects)} rejected rows, {len(report.unresolved)} unresolved")
    return 0


def cmd_assign_eras(args: argparse.Namespace) -> int:
    cfg = _config(args)
    policy = args.policy or cfg.repair_policy
    network = load_and_validate(args.nodes, args.edges, cfg)
    repaired, trace = repair_assignments(assign_eras(network, cfg.activity_offset), policy, cfg.activity_offset)
    out = _out(args)
    export.write_trace(trace, out / "assignment_trace.csv")
    export.write_moves(trace, out / "moves.csv")
    export.write_scholars(repaired, out / "scholars.csv")
    export.write_edges(repaired.edges, out / "edges.csv")
    print(f"{len(trace)} move(s); wrote {out / 'assignment_trace.csv'}")
    return 0


def cmd_slice(args: argparse.Namespace) -> int:
    network = _repaired_network(args)
    names = network.era_scheme.names
    out = _out(args)
    matrix = link_matrix(network)
    export.write_matrix(matrix, names, out / "link_matrix.csv")
    export.write_matrix(received_percentages(matrix).fractions, names, out / "received_percentages.csv")
    labels = {sid: s.label for sid, s in network.scholars.items()}
    slices = [slice_network(network, args.slice)] if args.slice else all_slices(network)
    for pn in slices:
        export.write_dot(pn, out / "dot" / f"{pn.kind.slug}.dot", labels)
    return 0


def cmd_metrics(args: argparse.Namespace) -> int:
    network = _repaired_network(args)
    kind = SliceKind.parse(args.slice)
    pn = slice_network(network, kind)
    m = bipartite_metrics(pn) if kind.kind == INTER else unipartite_metrics(pn)
    data = {"slice": str(kind), **m.to_dict()}
    if args.output:
        export.write_json(args.output, data)
    else:
        print(json.dumps(data, indent=2, sort_keys=True))
    return 0


def cmd_signatures(args: argparse.Namespace) -> int:
    network = _repaired_network(args)
    export.write_signatures(all_signatures(network), network.era_scheme.names, args.output)
    return 0


def cmd_patterns(args: argparse.Namespace) -> int:
    network = _repaired_network(args)
    k = len(network.era_scheme)
    eras = [args.era] if args.era is not None else range(k)
    export.write_patterns({e: pattern_frequencies(network, e) for e in eras}, network.era_scheme.names, args.output)
    return 0


def cmd_brokerage(args: argparse.Namespace) -> int:
    network = _repaired_network(args)
    names = network.era_scheme.names
    scores = brokerage_scores(network)
    out = _out(args)
    export.write_brokerage(scores, names, out / "brokerage.csv")
    export.write_role_distribution(role_count_distribution(scores, len(names)), names, out / "role_distribution.csv")
    return 0


def cmd_communities(args: argparse.Namespace) -> int:
    network = _repaired_network(args)
    seed = args.seed if args.seed is not None else _config(args).seed
    out = _out(args)
    for pn in all_slices(network):
        if pn.kind.kind == "accumulated":
            part = detect_communities(pn, seed=seed)
            export.write_partition(part, out / f"step_{part.step}.csv")
    return 0


_STEP_FILE = re.compile(r"^step_(\d+)\.csv$")


def _read_partitions(directory: str | Path) -> list:
    found = []
    for p in Path(directory).iterdir():
        m = _STEP_FILE.match(p.name)
        if m:
            found.append((int(m.group(1)), p))
    if not found:
        raise ConfigError(f"no step_<n>.csv partition files in {directory}")
    return [export.read_partition(p, step) for step, p in sorted(found)]


def cmd_track(args: argparse.Namespace) -> int:
    cfg = _config(args)
    theta = cfg.theta if args.theta is None else args.theta
    window = cfg.death_window if args.death_window is None else args.death_window
    partitions = _read_partitions(args.partitions)
    result = track(partitions, TrackingConfig(theta, window))
    out = _out(args)
    export.write_events(result, out / "events.csv")
    export.write_dynamic_communities(result, out / "dynamic_communities.csv")
    export.write_presence_patterns(era_presence_patterns(result, len(cfg.scheme)), cfg.scheme.names,
                                   out / "presence_patterns.csv")
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = _config(args)
    thetas = parse_thetas(args.theta)
    window = cfg.death_window if args.death_window is None else args.death_window
    partitions = _read_partitions(args.partitions)
    if args.scholars:
        scholars = export.read_scholars(args.scholars, cfg.scheme)
        eras = {sid: s.era_index for sid, s in scholars.items() if s.era_index is not None}
    else:
        # without era labels, each node is attributed to the step where it first appears
        eras = {}
        for part in partitions:
            for node in part.assignment:
                eras.setdefault(node, part.step)
    rows = theta_sweep(partitions, thetas, window, eras, len(cfg.scheme))
    export.write_records(rows, args.output)
    print(f"{len(rows)} theta value(s); wrote {args.output}")
    return 0


def cmd_fetch(args: argparse.Namespace) -> int:
    query = Path(args.query).read_text(encoding="utf-8")
    result = fetch_sparql(args.endpoint, query, args.page_size, backoff=args.backoff, method=args.method)
    out = _out(args)
    export.write_csv(out / "nodes.csv", ("id", "label", "birth", "death"),
                     [(r.id, r.label, r.birth_year, r.death_year) for r in result.actors])
    export.write_edges(result.edges, out / "edges.csv")
    export.write_csv(out / "rejects.csv", ("source", "row", "reason", "raw"),
                     [(r.file, r.line, r.reason, r.raw) for r in result.rejects])
    print(f"{len(result.edges)} edges, {len(result.actors)} actors, {len(result.rejects)} rejects "
          f"in {result.pages} page(s)")
    return 0


def cmd_run(args: argparse.Namespace) -> int:
    result = run_pipeline(args.config, args.nodes, args.edges, args.output, threads=args.threads)
    if result.status:
        print(f"error: {result.message}", file=sys.stderr)
    else:
        timings = result.manifest["timings"]
        print(f"ok: {len(result.manifest['outputs'])} files in {args.output} ({sum(timings.values()):.2f}s)")
    return result.status


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eranet", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, fn, help_text: str, *, raw=False, repaired=False, output=None):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="YAML config file (defaults apply when omitted)")
        if raw:
            p.add_argument("--nodes", required=True, help="node file: id,label,birth,death")
            p.add_argument("--edges", required=True, help="edge file: source,target")
        if repaired:
            p.add_argument("--scholars", required=True, help="scholars.csv written by assign-eras")
            p.add_argument("--edges", required=True, help="edges.csv written by assign-eras")
        if output is not None:
            p.add_argument("--output", "-o", required=output, help="output path")
        p.set_defaults(func=fn)
        return p

    add("validate", cmd_validate, "parse and validate input files", raw=True)
    p = add("assign-eras", cmd_assign_eras, "assign and repair eras", raw=True, output=True)
    p.add_argument("--policy", choices=("minimal", "backward", "forward"))
    p = add("slice", cmd_slice, "write the link matrix and DOT files for slices", repaired=True, output=True)
    p.add_argument("--slice", help="a single slice such as within:0, inter:0:2 or accumulated:3")
    p = add("metrics", cmd_metrics, "structural metrics of one slice as JSON", repaired=True, output=False)
    p.add_argument("--slice", required=True, help="within:E, inter:S:T or accumulated:E")
    add("signatures", cmd_signatures, "influence signatures and power", repaired=True, output=True)
    p = add("patterns", cmd_patterns, "influence pattern frequencies", repaired=True, output=True)
    p.add_argument("--era", type=int, help="restrict to one era index")
    add("brokerage", cmd_brokerage, "brokerage role counts", repaired=True, output=True)
    p = add("communities", cmd_communities, "detect communities per accumulated era", repaired=True, output=True)
    p.add_argument("--seed", type=int)
    p = add("track", cmd_track, "track communities across steps", output=True)
    p.add_argument("--partitions", required=True, help="directory of step_<n>.csv files")
    p.add_argument("--theta", type=float)
    p.add_argument("--death-window", type=int)
    p = add("sweep", cmd_sweep, "tracking summary for a range of thresholds", output=True)
    p.add_argument("--partitions", required=True, help="directory of step_<n>.csv files")
    p.add_argument("--theta", default=DEFAULT_SWEEP, help="start:stop:step (inclusive) or a comma list")
    p.add_argument("--death-window", type=int)
    p.add_argument("--scholars", help="scholars.csv with eras, for diversity")
    p = add("fetch", cmd_fetch, "download an influence network from a SPARQL endpoint", output=True)
    p.add_argument("--endpoint", default=None, help=f"endpoint URL (overridden by ${ENDPOINT_ENV})")
    p.add_argument("--query", required=True, help="query template with {limit} and {offset} placeholders")
    p.add_argument("--page-size", type=int, default=1000)
    p.add_argument("--backoff", type=float, default=1.0)
    p.add_argument("--method", choices=("GET", "POST"), default="GET")
    p = add("run", cmd_run, "run the full pipeline", raw=True, output=True)
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (EranetError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exit_code_for(exc)


if __name__ == "__main__":
    sys.exit(main())
