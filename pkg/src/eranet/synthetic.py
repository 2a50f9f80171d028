"""Random influence networks for property checks and benchmarks."""

from __future__ import annotations

import random
from pathlib import Path

from eranet.export import write_csv
from eranet.model import DEFAULT_HORIZON, EraScheme, InfluenceEdge, InfluenceNetwork, Scholar, default_scheme


def random_network(
    rng: random.Random,
    n_nodes: int,
    n_edges: int,
    *,
    first_year: int = -800,
    horizon: int = DEFAULT_HORIZON,
    scheme: EraScheme | None = None,
    chronological_bias: float = 0.0,
) -> InfluenceNetwork:
    """An unassigned network with lifespans inside ``[first_year, horizon]``.

    Edges are drawn uniformly over ordered pairs without self-loops, so
    plenty point backward in time. With ``chronological_bias`` set to ``p``,
    each edge is reoriented from the earlier-born actor with probability
    ``p``, which mimics real influence data where reversals are rare.
    """
    scheme = scheme or default_scheme()
    scholars = {}
    for i in range(n_nodes):
        birth = rng.randint(first_year, horizon - 1)
        death = min(horizon, birth + rng.randint(1, 95))
        sid = f"s{i:05d}"
        scholars[sid] = Scholar(sid, f"Scholar {i}", birth, death)
    ids = list(scholars)
    max_edges = n_nodes * (n_nodes - 1)
    n_edges = min(n_edges, max_edges)
    edges: set[InfluenceEdge] = set()
    while len(edges) < n_edges:
        a, b = rng.sample(ids, 2)
        if chronological_bias and rng.random() < chronological_bias and scholars[a].birth_year > scholars[b].birth_year:
            a, b = b, a
        edges.add(InfluenceEdge(a, b))
    return InfluenceNetwork(scholars, tuple(edges), scheme, horizon)


def write_network(network: InfluenceNetwork, directory: str | Path) -> tuple[Path, Path]:
    """Write ``nodes.csv`` and ``edges.csv`` in the ingest format."""
    directory = Path(directory)
    nodes = write_csv(directory / "nodes.csv", ("id", "label", "birth", "death"),
                      [(s.id, s.label, s.birth_year, s.death_year) for s in network.scholars.values()])
    edges = write_csv(directory / "edges.csv", ("source", "target"), network.edges)
    return nodes, edges
