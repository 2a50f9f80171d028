import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eranet.errors import InvalidSliceError, PreconditionError
from eranet.model import InfluenceNetwork, Scholar, default_scheme
from eranet.slicing import (
    SliceKind,
    all_slices,
    alive_per_year,
    link_matrix,
    received_percentages,
    slice_network,
)
from conftest import make_network, repaired_random

TWO_ERAS = default_scheme().from_records([{"name": "E0", "upper_bound_year": 1000},
                                          {"name": "E1", "upper_bound_year": 2020}])


@pytest.fixture
def toy():
    return make_network({"a": 0, "b": 0, "c": 1, "d": 1}, [("a", "b"), ("b", "c"), ("c", "d")], TWO_ERAS)


def test_within_slice(toy):
    pn = slice_network(toy, SliceKind.within(0))
    assert pn.nodes == {"a", "b"}
    assert len(pn.edges) == 1
    assert pn.population == 2


def test_inter_slice(toy):
    pn = slice_network(toy, "inter:0:1")
    assert pn.sources == {"b"} and pn.targets == {"c"}
    assert [tuple(e) for e in pn.edges] == [("b", "c")]


def test_accumulated_slice(toy):
    assert slice_network(toy, "accumulated:0").nodes == {"a", "b"}
    last = slice_network(toy, "accumulated:1")
    assert last.nodes == set(toy.scholars) and set(last.edges) == set(toy.edges)


def test_link_matrix(toy):
    assert link_matrix(toy).tolist() == [[1, 1], [0, 1]]


def test_empty_network_matrix():
    net = make_network({"a": 0, "b": 3}, [])
    assert not link_matrix(net).any()


def test_received_percentages():
    shares = received_percentages(np.array([[5, 2, 0], [0, 6, 0], [0, 0, 0]]))
    assert shares.fractions[:, 0].tolist() == [1.0, 0.0, 0.0]
    assert shares.fractions[:, 1].tolist() == pytest.approx([0.25, 0.75, 0.0])
    assert shares.empty_columns == [2]
    assert shares.fractions[:, 2].tolist() == [0.0, 0.0, 0.0]


@pytest.mark.parametrize("text", ["inter:1:1", "inter:2:0", "within", "sideways:1", "within:-1"])
def test_invalid_slice(text):
    with pytest.raises(InvalidSliceError):
        SliceKind.parse(text)


def test_slice_era_out_of_scheme(toy):
    with pytest.raises(InvalidSliceError):
        slice_network(toy, "within:5")


def test_unrepaired_network_rejected():
    net = make_network({"a": 1, "b": 0}, [("a", "b")])
    with pytest.raises(PreconditionError):
        slice_network(net, "within:0")


def test_slice_kind_roundtrip():
    for text in ("within:3", "inter:0:5", "accumulated:2"):
        assert str(SliceKind.parse(text)) == text


def test_alive_single_and_overlap():
    s = {"a": Scholar("a", "a", 100, 150, era_index=0), "b": Scholar("b", "b", 140, 200, era_index=0)}
    years, counts = alive_per_year(InfluenceNetwork(s, ()), 90, 210)
    series = dict(zip(years.tolist(), counts[:, 0].tolist()))
    assert series[99] == 0 and series[100] == 1 and series[139] == 1
    assert all(series[y] == 2 for y in range(140, 151))
    assert series[151] == 1 and series[200] == 1 and series[201] == 0


def test_alive_empty():
    years, counts = alive_per_year(InfluenceNetwork({}, ()), 0, 10)
    assert len(years) == 11 and not counts.any()


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6), n=st.integers(2, 60), m=st.integers(0, 150))
def test_slices_partition_edges(seed, n, m):
    net = repaired_random(random.Random(seed), n, m)
    k = len(net.era_scheme)
    slices = all_slices(net)
    counted = [e for pn in slices if pn.kind.kind != "accumulated" for e in pn.edges]
    assert sorted(counted) == sorted(net.edges)
    matrix = link_matrix(net)
    assert matrix.sum() == len(net.edges)
    assert not np.tril(matrix, -1).any()
    last = slice_network(net, SliceKind.accumulated(k - 1))
    assert last.nodes == set(net.scholars) and set(last.edges) == set(net.edges)
    for e in range(k - 1):
        small = slice_network(net, SliceKind.accumulated(e)).nodes
        assert small <= slice_network(net, SliceKind.accumulated(e + 1)).nodes
