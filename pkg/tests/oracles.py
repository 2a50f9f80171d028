"""Slow, obviously-correct reference implementations used to check the fast code.

Nothing here imports the algorithms under test; only plain data types.
"""

from __future__ import annotations

import itertools
import math


def reach(start, succ):
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for v in succ.get(u, ()):
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return seen


def _adjacency(nodes, edges, undirected=False):
    succ = {n: set() for n in nodes}
    for s, t in edges:
        succ[s].add(t)
        if undirected:
            succ[t].add(s)
    return succ


def wcc_count(nodes, edges):
    und = _adjacency(nodes, edges, undirected=True)
    classes = {frozenset(reach(n, und)) for n in nodes}
    return len(classes), max((len(c) for c in classes), default=0)


def scc_count(nodes, edges):
    """Components of size > 1 from pairwise mutual reachability."""
    succ = _adjacency(nodes, edges)
    r = {n: reach(n, succ) for n in nodes}
    classes = {frozenset(m for m in nodes if m in r[n] and n in r[m]) for n in nodes}
    return sum(1 for c in classes if len(c) > 1)


def reciprocity(edges):
    edges = list(edges)
    if not edges:
        return 0.0
    present = set(edges)
    return sum(1 for s, t in edges if (t, s) in present) / len(edges)


def transitivity(nodes, edges):
    und = {n: set() for n in nodes}
    for s, t in edges:
        if s != t:
            und[s].add(t)
            und[t].add(s)
    # every triangle a < b < c is found exactly once from its smallest edge (a, b)
    order = sorted(nodes)
    triangles = 0
    for a, b in itertools.combinations(order, 2):
        if b not in und[a]:
            continue
        for c in order:
            if c > b and c in und[a] and c in und[b]:
                triangles += 1
    triples = 0
    for center in nodes:
        for a, b in itertools.combinations(sorted(und[center]), 2):
            triples += 1
    return 3 * triangles / triples if triples else 0.0


def brokerage(eras, edges):
    """Role counts by scanning every ordered triple of distinct scholars."""
    edge_set = set(edges)
    nodes = sorted(eras)
    counts = {n: dict.fromkeys(("coordinator", "gatekeeper", "representative", "liaison", "consultant"), 0)
              for n in nodes}
    for a in nodes:
        for b in nodes:
            if b == a or (a, b) not in edge_set:
                continue
            for c in nodes:
                if c in (a, b) or (b, c) not in edge_set or (a, c) in edge_set:
                    continue
                ea, eb, ec = eras[a], eras[b], eras[c]
                if ea == eb == ec:
                    role = "coordinator"
                elif ea == ec:
                    role = "consultant"
                elif ea < eb == ec:
                    role = "gatekeeper"
                elif ea == eb < ec:
                    role = "representative"
                elif ea < eb < ec:
                    role = "liaison"
                else:
                    raise AssertionError(f"two-path {a}->{b}->{c} runs backward in time")
                counts[b][role] += 1
    return counts


def set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


def modularity(nodes, edges, blocks):
    """Q = 1/2m * sum_ij (A_ij - k_i k_j / 2m) [c_i == c_j] with A counting both edge directions."""
    nodes = list(nodes)
    a = {(u, v): 0 for u in nodes for v in nodes}
    for s, t in edges:
        a[s, t] += 1
        a[t, s] += 1
    k = {u: sum(a[u, v] for v in nodes) for u in nodes}
    two_m = sum(k.values())
    if two_m == 0:
        return 0.0
    label = {u: i for i, b in enumerate(blocks) for u in b}
    q = 0.0
    for u in nodes:
        for v in nodes:
            if label[u] == label[v]:
                q += a[u, v] - k[u] * k[v] / two_m
    return q / two_m


def best_modularity(nodes, edges):
    return max(modularity(nodes, edges, p) for p in set_partitions(sorted(nodes)))


def bell(n):
    return sum(1 for _ in set_partitions(list(range(n))))


def entropy_diversity(eras, k):
    n = len(eras)
    h = 0.0
    for e in set(eras):
        p = eras.count(e) / n
        h -= p * math.log2(p)
    return h / math.log2(k)
