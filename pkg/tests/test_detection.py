import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from eranet.community import CommunityPartition, community_stats, detect_communities, louvain, modularity
from eranet.errors import PreconditionError
from eranet.model import InfluenceEdge
from eranet.slicing import PartialNetwork, SliceKind


def edges_of(pairs):
    return [InfluenceEdge(s, t) for s, t in pairs]


def two_cliques():
    left, right = "abcd", "efgh"
    pairs = [(x, y) for block in (left, right) for x, y in itertools.combinations(block, 2)]
    pairs.append(("d", "e"))
    return sorted(left + right), pairs


def test_two_cliques_split_at_bridge():
    nodes, pairs = two_cliques()
    part = louvain(nodes, edges_of(pairs), seed=0)
    comms = sorted(sorted(m) for m in part.communities().values())
    assert comms == [list("abcd"), list("efgh")]
    best = oracles.best_modularity(nodes, pairs)
    assert abs(modularity(nodes, edges_of(pairs), part.assignment) - best) <= 1e-9


def test_empty_graph():
    part = louvain([], [])
    assert part.assignment == {} and part.n_communities == 0


def test_single_clique():
    pairs = list(itertools.combinations("abcde", 2))
    assert louvain("abcde", edges_of(pairs)).n_communities == 1


def test_isolated_nodes_stay_alone():
    part = louvain(["a", "b", "c"], edges_of([("a", "b")]))
    assert part.assignment["c"] != part.assignment["a"] == part.assignment["b"]


def test_dense_ids_by_size():
    nodes, pairs = two_cliques()
    pairs = pairs + [("h", "i"), ("i", "j"), ("j", "h")]
    part = louvain(nodes + ["i", "j"], edges_of(pairs), seed=3)
    sizes = [len(m) for m in part.communities().values()]
    assert sizes == sorted(sizes, reverse=True)
    assert sorted(part.communities()) == list(range(part.n_communities))


def test_detection_only_on_accumulated():
    pn = PartialNetwork(SliceKind.within(0), frozenset("ab"), tuple(edges_of([("a", "b")])))
    with pytest.raises(PreconditionError):
        detect_communities(pn)
    acc = PartialNetwork(SliceKind.accumulated(2), frozenset("ab"), tuple(edges_of([("a", "b")])))
    assert detect_communities(acc).step == 2


def test_modularity_matches_oracle_formula():
    nodes, pairs = two_cliques()
    pairs = pairs + [("b", "a"), ("f", "c")]
    rng = random.Random(1)
    for _ in range(20):
        assignment = {n: rng.randrange(3) for n in nodes}
        blocks = [[n for n in nodes if assignment[n] == c] for c in range(3)]
        blocks = [b for b in blocks if b]
        got = modularity(nodes, edges_of(pairs), assignment)
        assert abs(got - oracles.modularity(nodes, pairs, blocks)) <= 1e-12


def test_set_partition_enumeration():
    assert [oracles.bell(n) for n in range(1, 7)] == [1, 2, 5, 15, 52, 203]


def test_stats_counts():
    assignment = {}
    for cid, size in enumerate([24, 13, 13, 3]):
        assignment.update({f"c{cid}_{i}": cid for i in range(size)})
    stats = community_stats(CommunityPartition(0, assignment))
    assert stats["n_communities"] == 4 and stats["n_large"] == 3
    assert stats["top"][0]["nodes"] == 24
    assert stats["sizes"]["max"] == 24 and stats["sizes"]["min"] == 3


def test_stats_thresholds():
    singletons = CommunityPartition(0, {str(i): i for i in range(5)})
    assert community_stats(singletons)["n_large"] == 0
    ten = CommunityPartition(0, {str(i): 0 for i in range(10)})
    assert community_stats(ten)["n_large"] == 1


def test_stats_top_edges():
    nodes, pairs = two_cliques()
    pn = PartialNetwork(SliceKind.accumulated(0), frozenset(nodes), tuple(edges_of(pairs)))
    stats = community_stats(detect_communities(pn), pn)
    assert [t["edges"] for t in stats["top"]] == [6, 6]


def random_graph(seed, n, m):
    rng = random.Random(seed)
    nodes = [f"v{i}" for i in range(n)]
    pairs = set()
    while len(pairs) < min(m, n * (n - 1)):
        pairs.add(tuple(rng.sample(nodes, 2)))
    return nodes, sorted(pairs)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6), n=st.integers(2, 40), ratio=st.floats(0, 4), lseed=st.integers(0, 100))
def test_monotone_ascent_and_reported_modularity(seed, n, ratio, lseed):
    nodes, pairs = random_graph(seed, n, int(n * ratio))
    part = louvain(nodes, edges_of(pairs), seed=lseed)
    trace = part.modularity_trace
    assert all(b > a for a, b in zip(trace, trace[1:]))
    assert abs(trace[-1] - modularity(nodes, edges_of(pairs), part.assignment)) <= 1e-9
    assert set(part.assignment) == set(nodes)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10**6), n=st.integers(2, 30))
def test_same_seed_same_partition(seed, n):
    nodes, pairs = random_graph(seed, n, 2 * n)
    assert louvain(nodes, edges_of(pairs), seed=5).assignment == louvain(nodes, edges_of(pairs), seed=5).assignment


def test_break_up_escapes_pairwise_trap():
    # six-node path split into three pairs: no single move helps, but the middle pair can be shared out
    from eranet.community.detection import _Level

    order = ["v3", "v1", "v5", "v4", "v2", "v0"]
    idx = {n: i for i, n in enumerate(order)}
    adj = [{} for _ in order]
    for a, b in zip(order, order[1:]):
        adj[idx[a]][idx[b]] = adj[idx[b]][idx[a]] = 1.0
    level = _Level(6, adj, [0.0] * 6)
    comm = [0, 0, 2, 2, 4, 4]
    before = level.modularity(comm)
    assert not level.local_moving(random.Random(0), comm)[1]
    assert level.break_up(comm, random.Random(0))
    assert level.modularity(comm) > before + 1e-9
    assert abs(level.modularity(comm) - 0.3) <= 1e-12


def test_break_up_reverts_when_nothing_gained():
    from eranet.community.detection import _Level

    nodes, pairs = two_cliques()
    idx = {n: i for i, n in enumerate(nodes)}
    adj = [{} for _ in nodes]
    for s, t in pairs:
        adj[idx[s]][idx[t]] = adj[idx[t]][idx[s]] = 1.0
    level = _Level(len(nodes), adj, [0.0] * len(nodes))
    comm = [0] * 4 + [4] * 4
    assert not level.break_up(comm, random.Random(3))
    assert comm == [0] * 4 + [4] * 4
