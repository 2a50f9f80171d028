from eranet import export
from eranet.community import CommunityPartition
from eranet.model import default_scheme
from conftest import make_network


def test_scholars_roundtrip(tmp_path):
    net = make_network({"a": 0, "b": 3}, [("a", "b")])
    path = export.write_scholars(net, tmp_path / "s.csv")
    back = export.read_scholars(path, default_scheme())
    assert back == net.scholars


def test_partition_roundtrip(tmp_path):
    part = CommunityPartition(2, {"x": 0, "y": 0, "z": 1})
    back = export.read_partition(export.write_partition(part, tmp_path / "p.csv"), 2)
    assert back.assignment == part.assignment and back.step == 2


def test_cells_are_exact(tmp_path):
    path = export.write_csv(tmp_path / "x.csv", ("a", "b", "c", "d"), [(0.1 + 0.2, True, None, 3)])
    assert path.read_text() == "a,b,c,d\n0.30000000000000004,true,,3\n"


def test_records_flatten(tmp_path):
    path = export.write_records([{"theta": 0.5, "members": {"mean": 2.0}}], tmp_path / "r.csv")
    assert path.read_text().splitlines() == ["theta,members_mean", "0.5,2.0"]


def test_dot_quotes_labels(tmp_path):
    from eranet.slicing import slice_network
    net = make_network({"a": 0, "b": 0}, [("a", "b")])
    text = export.write_dot(slice_network(net, "within:0"), tmp_path / "g.dot", {"a": 'say "hi"'}).read_text()
    assert 'label="say \\"hi\\""' in text and '"a" -> "b";' in text
