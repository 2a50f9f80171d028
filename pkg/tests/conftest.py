import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from eranet.chronology import assign_eras, repair_assignments  # noqa: E402
from eranet.model import InfluenceEdge, InfluenceNetwork, Scholar, default_scheme  # noqa: E402
from eranet.synthetic import random_network  # noqa: E402

DATA = Path(__file__).parent / "data"
TOY = DATA / "toy"

_acceptance: list[tuple[str, str]] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(name): headline acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    name = marker.args[0]
    if report.when == "call" or (report.when == "setup" and not report.passed):
        status = "PASS" if report.passed else "SKIP" if report.skipped else "FAIL"
        _acceptance.append((name, status))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, status in _acceptance:
        terminalreporter.write_line(f"{status:4}  {name}")


@pytest.fixture
def toy_paths():
    return TOY / "nodes.csv", TOY / "edges.csv", TOY / "config.yaml"


def make_network(spec, edges, scheme=None):
    """Build an assigned network from ``{id: era}`` (dates chosen inside the era)."""
    scheme = scheme or default_scheme()
    scholars = {}
    for sid, era in spec.items():
        hi = scheme.upper_bounds[era]
        scholars[sid] = Scholar(sid, sid, hi - 60, hi - 1, era_index=era)
    return InfluenceNetwork(scholars, tuple(InfluenceEdge(s, t) for s, t in edges), scheme)


def repaired_random(rng: random.Random, n_nodes: int, n_edges: int, bias: float = 0.0):
    net = random_network(rng, n_nodes, n_edges, chronological_bias=bias)
    repaired, _ = repair_assignments(assign_eras(net))
    return repaired
