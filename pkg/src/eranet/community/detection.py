"""Louvain-style modularity optimization on the undirected projection of a slice."""

from __future__ import annotations

import random
from collections import deque
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

import numpy as np

from eranet.errors import PreconditionError
from eranet.model import InfluenceEdge
from eranet.slicing import ACCUMULATED, PartialNetwork

MIN_GAIN = 1e-9
_MOVE_EPS = 1e-12


@dataclass(frozen=True)
class CommunityPartition:
    """Node -> community assignment for one era step.

    Community ids are dense, ordered by size (largest first) and then by the
    smallest member id. ``modularity_trace`` holds the modularity after each
    aggregation level, starting from the all-singletons partition.
    """

    step: int
    assignment: Mapping[str, int]
    modularity_trace: tuple[float, ...] = field(default=(), compare=False)

    @property
    def n_communities(self) -> int:
        return len(set(self.assignment.values()))

    def communities(self) -> dict[int, frozenset[str]]:
        groups: dict[int, set[str]] = {}
        for node, cid in self.assignment.items():
            groups.setdefault(cid, set()).add(node)
        return {cid: frozenset(groups[cid]) for cid in sorted(groups)}

    def sizes(self) -> list[int]:
        return [len(m) for m in self.communities().values()]


def undirected_weights(edges: Iterable[InfluenceEdge]) -> dict[tuple[str, str], float]:
    """Each directed edge adds weight 1 to its unordered pair; a mutual dyad weighs 2."""
    w: dict[tuple[str, str], float] = {}
    for s, t in edges:
        if s == t:
            continue
        key = (s, t) if s < t else (t, s)
        w[key] = w.get(key, 0.0) + 1.0
    return w


def modularity(nodes: Iterable[str], edges: Iterable[InfluenceEdge], assignment: Mapping[str, int]) -> float:
    """Newman modularity of ``assignment`` on the undirected weighted projection."""
    weights = undirected_weights(edges)
    m = sum(weights.values())
    if m == 0:
        return 0.0
    degree: dict[str, float] = dict.fromkeys(nodes, 0.0)
    internal: dict[int, float] = {}
    total: dict[int, float] = {}
    for (u, v), w in weights.items():
        degree[u] += w
        degree[v] += w
        if assignment[u] == assignment[v]:
            internal[assignment[u]] = internal.get(assignment[u], 0.0) + w
    for node, k in degree.items():
        total[assignment[node]] = total.get(assignment[node], 0.0) + k
    return sum(internal.get(c, 0.0) / m - (tot / (2 * m)) ** 2 for c, tot in total.items())


class _Level:
    """Weighted undirected graph on integer nodes; ``loops[i]`` is internal weight."""

    def __init__(self, n: int, adj: list[dict[int, float]], loops: list[float]):
        self.n = n
        self.adj = adj
        self.loops = loops
        self.degree = [2 * loops[i] + sum(adj[i].values()) for i in range(n)]
        self.two_m = sum(self.degree)

    def modularity(self, comm: list[int]) -> float:
        if self.two_m == 0:
            return 0.0
        internal: dict[int, float] = {}
        total: dict[int, float] = {}
        for i in range(self.n):
            c = comm[i]
            total[c] = total.get(c, 0.0) + self.degree[i]
            inside = 2 * self.loops[i] + sum(w for j, w in self.adj[i].items() if comm[j] == c)
            internal[c] = internal.get(c, 0.0) + inside
        return sum(internal.get(c, 0.0) / self.two_m - (t / self.two_m) ** 2 for c, t in total.items())

    def local_moving(self, rng: random.Random, start: list[int] | None = None) -> tuple[list[int], bool]:
        """Greedy single-node moves until no queued node can improve modularity.

        Starts from singletons, or from ``start`` (community labels in
        ``range(n)``). Nodes start queued in shuffled order; when a node moves,
        its neighbours outside its new community are queued again. Every
        accepted move strictly increases modularity.
        """
        comm = list(start) if start is not None else list(range(self.n))
        tot = [0.0] * self.n
        for i, c in enumerate(comm):
            tot[c] += self.degree[i]
        order = list(range(self.n))
        rng.shuffle(order)
        _, log = self._move_nodes(comm, tot, order)
        return comm, bool(log)

    def _move_nodes(
        self, comm: list[int], tot: list[float], order: list[int], banned: set[int] | None = None
    ) -> tuple[float, list[tuple[int, int]]]:
        """Queue-driven moves on ``comm``/``tot`` in place.

        With ``banned``, each node in ``order`` is visited once and may not
        join a banned label other than its own. Returns the modularity gain
        and a log of ``(node, previous label)``.
        """
        two_m = self.two_m
        degree, adj = self.degree, self.adj
        queue = deque(order)
        queued = [False] * self.n
        for i in order:
            queued[i] = True
        log: list[tuple[int, int]] = []
        gained = 0.0
        while queue:
            i = queue.popleft()
            queued[i] = False
            ki = degree[i]
            if ki == 0:
                continue
            ci = comm[i]
            links: dict[int, float] = {}
            for j, w in adj[i].items():
                cj = comm[j]
                links[cj] = links.get(cj, 0.0) + w
            tot[ci] -= ki
            # gain of inserting i into c, up to a constant shared by all c
            scale = ki / two_m
            best_c = ci
            stay = best_gain = links.get(ci, 0.0) - tot[ci] * scale
            for c, w in links.items():
                if banned is not None and c in banned:
                    continue
                gain = w - tot[c] * scale
                if gain > best_gain + _MOVE_EPS:
                    best_c, best_gain = c, gain
            tot[best_c] += ki
            if best_c != ci:
                comm[i] = best_c
                log.append((i, ci))
                gained += 2 * (best_gain - stay) / two_m
                if banned is not None:
                    continue
                for j in adj[i]:
                    if not queued[j] and comm[j] != best_c:
                        queued[j] = True
                        queue.append(j)
        return gained, log

    def break_up(self, comm: list[int], rng: random.Random) -> bool:
        """Dissolve each community in turn into singletons and let its members move again.

        Local moving cannot leave a partition where only a joint move of
        several nodes helps. Here the members first pick their best community
        outside the dissolved one (or stay alone), then ordinary moves
        resume. A rebuild is kept when it gains more than ``MIN_GAIN``, else
        undone.
        """
        two_m = self.two_m
        tot = [0.0] * self.n
        size = [0] * self.n
        members: dict[int, list[int]] = {}
        for i, c in enumerate(comm):
            tot[c] += self.degree[i]
            size[c] += 1
            members.setdefault(c, []).append(i)
        free = [c for c in range(self.n) if size[c] == 0]
        improved = False
        for c in sorted(members):
            group = [i for i in members[c] if comm[i] == c]
            if len(group) < 2:
                continue
            inside = set(group)
            internal = sum(w for i in group for j, w in self.adj[i].items() if j in inside)
            before = internal / two_m - (tot[c] / two_m) ** 2
            after = sum((self.degree[i] / two_m) ** 2 for i in group)
            labels = [c] + [free.pop() for _ in group[1:]]
            for i, lab in zip(group, labels):
                comm[i] = lab
                tot[lab] = self.degree[i]
                size[lab] = 1
            order = list(group)
            rng.shuffle(order)
            gained, log = self._move_nodes(comm, tot, order, banned=set(labels))
            more, tail = self._move_nodes(comm, tot, order)
            gained += more
            log += tail
            if gained - before - after > MIN_GAIN:
                improved = True
                for i, old in log:
                    size[old] -= 1
                    size[comm[i]] += 1
                    members.setdefault(comm[i], []).append(i)
                free.extend(old for old in sorted({old for _, old in log}) if size[old] == 0)
            else:
                for i, old in reversed(log):
                    tot[comm[i]] -= self.degree[i]
                    tot[old] += self.degree[i]
                    comm[i] = old
                for i in group:
                    comm[i] = c
                for lab in labels[1:]:
                    tot[lab] = 0.0
                    size[lab] = 0
                    free.append(lab)
                tot[c] = sum(self.degree[i] for i in group)
                size[c] = len(group)
        return improved

    def aggregate(self, comm: list[int]) -> tuple[_Level, list[int]]:
        """Collapse communities into nodes; returns the new level and the node -> new node map."""
        relabel: dict[int, int] = {}
        for c in comm:
            relabel.setdefault(c, len(relabel))
        mapping = [relabel[c] for c in comm]
        n = len(relabel)
        adj: list[dict[int, float]] = [{} for _ in range(n)]
        loops = [0.0] * n
        for i in range(self.n):
            ci = mapping[i]
            loops[ci] += self.loops[i]
            for j, w in self.adj[i].items():
                cj = mapping[j]
                if ci == cj:
                    if i < j:
                        loops[ci] += w
                else:
                    adj[ci][cj] = adj[ci].get(cj, 0.0) + w
        return _Level(n, adj, loops), mapping


def _dense_assignment(nodes: list[str], labels: list[int]) -> dict[str, int]:
    groups: dict[int, list[str]] = {}
    for node, lab in zip(nodes, labels):
        groups.setdefault(lab, []).append(node)
    ordered = sorted(groups.values(), key=lambda g: (-len(g), min(g)))
    return {node: cid for cid, members in enumerate(ordered) for node in members}


def louvain(
    nodes: Iterable[str], edges: Iterable[InfluenceEdge], seed: int = 0, step: int = 0
) -> CommunityPartition:
    """Greedy modularity maximization by local moving and aggregation.

    After the levels run out, node moves on the original graph are retried
    from the current partition (a node may be stuck inside an aggregate it
    should leave) and, if anything moved, aggregation resumes from there.
    Once a round gains no more than ``1e-9``, each community is rebuilt from
    singletons in turn (see ``_Level.break_up``); any kept rebuild starts
    another round.

    Node visit order is shuffled by ``random.Random(seed)``, so results are
    reproducible for a given seed. ``modularity_trace`` holds the starting
    modularity and the value after every level that moved a node and after
    every kept rebuild pass; it is strictly increasing.
    """
    node_list = sorted(set(nodes))
    index = {n: i for i, n in enumerate(node_list)}
    adj: list[dict[int, float]] = [{} for _ in node_list]
    for (u, v), w in undirected_weights(edges).items():
        i, j = index[u], index[v]
        adj[i][j] = adj[i].get(j, 0.0) + w
        adj[j][i] = adj[j].get(i, 0.0) + w
    base = _Level(len(node_list), adj, [0.0] * len(node_list))
    labels = list(range(base.n))
    rng = random.Random(seed)
    trace = [base.modularity(labels)]
    if base.two_m == 0:
        return CommunityPartition(step, _dense_assignment(node_list, labels), tuple(trace))

    while True:
        round_start = trace[-1]
        # pos[v]: the node of the current level that original node v belongs to
        pos = list(range(base.n))
        level, start = base, labels
        while True:
            comm, moved = level.local_moving(rng, start)
            if not moved:
                break
            level, mapping = level.aggregate(comm)
            pos = [mapping[x] for x in pos]
            trace.append(base.modularity(pos))
            start = None
        labels = pos if trace[-1] > round_start else labels
        if trace[-1] - round_start > MIN_GAIN:
            continue
        labels = list(labels)
        if not base.break_up(labels, rng):
            break
        trace.append(base.modularity(labels))
    return CommunityPartition(step, _dense_assignment(node_list, labels), tuple(trace))


def detect_communities(pn: PartialNetwork, seed: int = 0) -> CommunityPartition:
    if pn.kind.kind != ACCUMULATED:
        raise PreconditionError("community detection runs on accumulated-era slices")
    return louvain(pn.nodes, pn.edges, seed=seed, step=pn.kind.eras[0])


def community_stats(partition: CommunityPartition, pn: PartialNetwork | None = None, large: int = 10) -> dict:
    """Community counts, the three largest communities, and a size summary.

    With ``pn`` given, each of the top three also reports its internal edge count.
    """
    comms = partition.communities()
    sizes = np.array([len(m) for m in comms.values()], dtype=float)
    top = []
    for cid in list(comms)[:3]:
        members = comms[cid]
        entry = {"community": cid, "nodes": len(members)}
        if pn is not None:
            entry["edges"] = sum(1 for s, t in pn.edges if s in members and t in members)
        top.append(entry)
    if sizes.size:
        summary = {
            "mean": float(sizes.mean()),
            "std": float(sizes.std(ddof=1)) if sizes.size > 1 else 0.0,
            "min": float(sizes.min()),
            "q25": float(np.percentile(sizes, 25)),
            "median": float(np.percentile(sizes, 50)),
            "q75": float(np.percentile(sizes, 75)),
            "max": float(sizes.max()),
        }
    else:
        summary = dict.fromkeys(("mean", "std", "min", "q25", "median", "q75", "max"), 0.0)
    return {
        "step": partition.step,
        "n_communities": len(comms),
        "n_large": int((sizes >= large).sum()),
        "top": top,
        "sizes": summary,
    }
