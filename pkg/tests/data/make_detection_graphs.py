"""Regenerate detection_graphs.json: 50 small digraphs with brute-force modularity optima.

Run from the tests directory: ``python3 data/make_detection_graphs.py``.
"""

import itertools
import json
import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))
import oracles  # noqa: E402


def graphs():
    yield "two cliques and a bridge", list("abcdefgh"), [
        *itertools.combinations("abcd", 2), *itertools.combinations("efgh", 2), ("d", "e")]
    yield "5-clique", list("abcde"), list(itertools.combinations("abcde", 2))
    yield "no edges", list("abc"), []
    yield "path", list("abcdefgh"), list(zip("abcdefg", "bcdefgh"))
    yield "star", list("abcdefg"), [("a", x) for x in "bcdefg"]
    yield "two triangles", list("abcdef"), [("a", "b"), ("b", "c"), ("c", "a"), ("d", "e"), ("e", "f"), ("f", "d")]
    yield "mutual ring", list("abcdef"), [(x, y) for x, y in zip("abcdef", "bcdefa")] + [
        (y, x) for x, y in zip("abc", "bcd")]
    rng = random.Random(20240601)
    i = 0
    while True:
        n = rng.randint(3, 8)
        nodes = [f"v{j}" for j in range(n)]
        p = rng.uniform(0.15, 0.7)
        edges = [(a, b) for a in nodes for b in nodes if a != b and rng.random() < p / 2]
        if not edges:
            continue
        i += 1
        yield f"random {i}", nodes, edges


fixtures = []
for name, nodes, edges in itertools.islice(graphs(), 50):
    fixtures.append({
        "name": name,
        "nodes": nodes,
        "edges": [list(e) for e in edges],
        "optimum": oracles.best_modularity(nodes, edges),
    })
out = Path(__file__).with_name("detection_graphs.json")
out.write_text(json.dumps(fixtures, indent=1) + "\n")
print(f"wrote {len(fixtures)} graphs to {out}")
