"""Structural metrics for partial networks.

Within-era and accumulated-era slices get the unipartite battery; inter-era
slices are treated as bipartite (sources in the earlier era, targets in the
later one) and get degree statistics over participating nodes.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import asdict, dataclass

from eranet.errors import PreconditionError
from eranet.model import InfluenceEdge
from eranet.slicing import INTER, WITHIN, PartialNetwork


@dataclass(frozen=True)
class UnipartiteMetrics:
    n_nodes: int
    n_edges: int
    participation_ratio: float | None
    density: float
    density_undefined: bool
    avg_out_degree: float
    max_in_degree: int
    max_out_degree: int
    max_total_degree: int
    wcc_count: int
    largest_wcc_size: int
    largest_wcc_fraction: float
    scc_count: int
    reciprocity: float
    transitivity: float

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class BipartiteMetrics:
    n_nodes: int
    n_edges: int
    n_sources: int
    n_targets: int
    density: float
    avg_in_degree: float
    max_in_degree: int
    avg_out_degree: float
    max_out_degree: int
    empty: bool

    def to_dict(self) -> dict:
        return asdict(self)


def weakly_connected_components(nodes: Iterable[str], edges: Iterable[InfluenceEdge]) -> list[set[str]]:
    parent = {n: n for n in nodes}

    def find(x: str) -> str:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    for s, t in edges:
        rs, rt = find(s), find(t)
        if rs != rt:
            parent[rs] = rt
    groups: dict[str, set[str]] = {}
    for n in parent:
        groups.setdefault(find(n), set()).add(n)
    return list(groups.values())


def strongly_connected_components(nodes: Iterable[str], edges: Iterable[InfluenceEdge]) -> list[set[str]]:
    """Tarjan's algorithm, iterative so deep chains do not hit the recursion limit."""
    succ: dict[str, list[str]] = {n: [] for n in nodes}
    for s, t in edges:
        succ[s].append(t)
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    components: list[set[str]] = []
    counter = 0
    for root in sorted(succ):
        if root in index:
            continue
        work = [(root, iter(succ[root]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(succ[w])))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = set()
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.add(w)
                    if w == v:
                        break
                components.append(comp)
    return components


def reciprocity(edges: Iterable[InfluenceEdge]) -> float:
    """Fraction of edges whose reverse edge is also present."""
    edge_set = set(edges)
    if not edge_set:
        return 0.0
    mutual = sum(1 for s, t in edge_set if (t, s) in edge_set)
    return mutual / len(edge_set)


def transitivity(nodes: Iterable[str], edges: Iterable[InfluenceEdge]) -> float:
    """Global clustering of the undirected simple projection: 3 * triangles / connected triples."""
    nbrs: dict[str, set[str]] = {n: set() for n in nodes}
    for s, t in edges:
        if s != t:
            nbrs[s].add(t)
            nbrs[t].add(s)
    triples = sum(len(v) * (len(v) - 1) // 2 for v in nbrs.values())
    if triples == 0:
        return 0.0
    order = {n: i for i, n in enumerate(sorted(nbrs, key=lambda n: (len(nbrs[n]), n)))}
    triangles = 0
    for u, nu in nbrs.items():
        higher = {v for v in nu if order[v] > order[u]}
        for v in higher:
            triangles += sum(1 for w in nbrs[v] if w in higher and order[w] > order[v])
    return 3 * triangles / triples


def unipartite_metrics(pn: PartialNetwork) -> UnipartiteMetrics:
    if pn.kind.kind == INTER:
        raise PreconditionError("inter-era slices are bipartite; use bipartite_metrics")
    n, e = len(pn.nodes), len(pn.edges)
    out_deg, in_deg = pn.out_degrees(), pn.in_degrees()
    wcc = weakly_connected_components(pn.nodes, pn.edges)
    largest = max((len(c) for c in wcc), default=0)
    scc = strongly_connected_components(pn.nodes, pn.edges)
    undefined = n < 2
    return UnipartiteMetrics(
        n_nodes=n,
        n_edges=e,
        participation_ratio=(n / pn.population if pn.population else 0.0) if pn.kind.kind == WITHIN else None,
        density=0.0 if undefined else e / (n * (n - 1)),
        density_undefined=undefined,
        avg_out_degree=e / n if n else 0.0,
        max_in_degree=max(in_deg.values(), default=0),
        max_out_degree=max(out_deg.values(), default=0),
        max_total_degree=max((in_deg[x] + out_deg[x] for x in pn.nodes), default=0),
        wcc_count=len(wcc),
        largest_wcc_size=largest,
        largest_wcc_fraction=largest / n if n else 0.0,
        scc_count=sum(1 for c in scc if len(c) > 1),
        reciprocity=reciprocity(pn.edges),
        transitivity=transitivity(pn.nodes, pn.edges),
    )


def bipartite_metrics(pn: PartialNetwork) -> BipartiteMetrics:
    """Degree statistics of an inter-era slice, averaged over participating nodes only."""
    if pn.kind.kind != INTER:
        raise PreconditionError("bipartite_metrics needs an inter-era slice")
    e = len(pn.edges)
    if e == 0:
        return BipartiteMetrics(0, 0, 0, 0, 0.0, 0.0, 0, 0.0, 0, True)
    out_deg: dict[str, int] = {}
    in_deg: dict[str, int] = {}
    for s, t in pn.edges:
        out_deg[s] = out_deg.get(s, 0) + 1
        in_deg[t] = in_deg.get(t, 0) + 1
    ns, nt = len(out_deg), len(in_deg)
    return BipartiteMetrics(
        n_nodes=ns + nt,
        n_edges=e,
        n_sources=ns,
        n_targets=nt,
        density=e / (ns * nt),
        avg_in_degree=e / nt,
        max_in_degree=max(in_deg.values()),
        avg_out_degree=e / ns,
        max_out_degree=max(out_deg.values()),
        empty=False,
    )


def top_k_by_degree(pn: PartialNetwork, direction: str = "out", k: int = 5) -> list[tuple[str, int]]:
    """Highest-degree nodes, ties broken by id."""
    if k < 1:
        raise ValueError("k must be at least 1")
    if direction == "out":
        deg = pn.out_degrees()
    elif direction == "in":
        deg = pn.in_degrees()
    elif direction == "total":
        out_deg, in_deg = pn.out_degrees(), pn.in_degrees()
        deg = {n: out_deg[n] + in_deg[n] for n in pn.nodes}
    else:
        raise ValueError(f"direction must be in, out or total, not {direction!r}")
    return sorted(deg.items(), key=lambda kv: (-kv[1], kv[0]))[:k]
