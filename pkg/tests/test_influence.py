import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eranet.errors import PreconditionError
from eranet.influence import (
    InfluenceSignature,
    all_signatures,
    influence_power,
    pattern,
    pattern_frequencies,
    signature,
)
from eranet.model import default_scheme
from conftest import make_network, repaired_random

FOUR = default_scheme().from_records(
    [{"name": f"E{i}", "upper_bound_year": y} for i, y in enumerate((500, 1000, 1500, 2020))]
)


def test_toy_signature():
    net = make_network({"s": 1, "x": 1, "y": 1, "z": 3}, [("s", "x"), ("s", "y"), ("s", "z")], FOUR)
    assert signature(net, "s").values == (2, 0, 1)


def test_isolated_scholar():
    net = make_network({"a": 0, "b": 2}, [])
    sig = signature(net, "a")
    assert sig.values == (0,) * 6 and influence_power(sig) == 0.0


def test_unknown_id():
    with pytest.raises(KeyError):
        signature(make_network({"a": 0}, []), "nobody")


def test_unrepaired_rejected():
    net = make_network({"a": 1, "b": 0}, [("a", "b")])
    with pytest.raises(PreconditionError):
        signature(net, "a")


@pytest.mark.parametrize("own,values,power,shown", [
    (0, (10, 12, 19, 11, 16, 46), 19.0, "19.0"),
    (4, (68, 78), 73.0, "73.0"),
    (2, (30, 20, 13, 10), 18.25, "18.2"),
])
def test_power_anchors(own, values, power, shown):
    sig = InfluenceSignature("x", own, values)
    assert abs(influence_power(sig) - power) <= 1e-12
    assert f"{influence_power(sig):.1f}" == shown


@pytest.mark.parametrize("values,marks", [
    ((10, 12, 19, 11, 16, 46), "XXXXXX"),
    ((5, 0, 0, 0, 0, 0), "X00000"),
    ((0, 3), "0X"),
])
def test_patterns(values, marks):
    assert "".join(pattern(InfluenceSignature("x", 6 - len(values), values)).marks) == marks


def test_last_era_has_single_pattern():
    net = make_network({"a": 5, "b": 5, "c": 5, "d": 4}, [("a", "b"), ("b", "c"), ("d", "a")])
    rows = pattern_frequencies(net, 5)
    assert [("".join(p.marks), c, f) for p, c, f in rows] == [("X", 2, 1.0)]


def test_pattern_frequencies_sorted():
    net = make_network(
        {"a": 0, "b": 0, "c": 0, "d": 0, "x": 1, "y": 2},
        [("a", "x"), ("b", "x"), ("c", "y"), ("d", "a")],
    )
    rows = pattern_frequencies(net, 0)
    assert [("".join(p.marks), c) for p, c, _ in rows] == [("0X0000", 2), ("00X000", 1), ("X00000", 1)]
    assert sum(f for _, _, f in rows) == pytest.approx(1.0)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6), n=st.integers(2, 50))
def test_signature_sums_to_out_degree(seed, n):
    net = repaired_random(random.Random(seed), n, 2 * n)
    k = len(net.era_scheme)
    for sig in all_signatures(net):
        assert len(sig.values) == k - sig.own_era
        assert sig.total == len(net.successors[sig.scholar_id])
        assert all(v >= 0 for v in sig.values)
        assert 0 <= influence_power(sig) <= sig.total
