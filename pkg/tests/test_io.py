import json

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from burstcoord import BcsbmParams, Event, IngestError, Partition, ProfileKey, simulate
from burstcoord import io
from burstcoord.simgraph import SimilarityGraph

tmp_settings = settings(max_examples=30, suppress_health_check=[HealthCheck.function_scoped_fixture])

ids = st.text(st.characters(codec="utf-8", exclude_categories=["Cs", "Cc"]), min_size=1, max_size=8)


@tmp_settings
@given(st.lists(st.builds(Event, ids, ids, st.floats(0, 1e12)), max_size=30))
def test_events_jsonl_round_trip(tmp_path, events):
    path = tmp_path / "ev.jsonl"
    io.write_events(events, path)
    assert io.read_events(path) == events


def test_events_csv(tmp_path):
    path = tmp_path / "ev.csv"
    path.write_text("entity,domain,t\nu,x,1.5\nv,x,2\n", encoding="utf-8")
    assert io.read_events(path) == [Event("u", "x", 1.5), Event("v", "x", 2.0)]


@pytest.mark.parametrize("text, lineno", [
    ('{"entity": "u", "domain": "d", "t": 1}\n{"entity": "u", "domain"\n', 2),
    ('{"entity": "u", "domain": "d", "t": 1}\n\n{"entity": "u", "domain": "d", "t": "x"}\n', 3),
    ('{"entity": "u", "domain": "d"}\n', 1),
    ('{"entity": "u", "domain": "d", "t": -3}\n', 1),
    ('{"entity": "u", "domain": "d", "t": NaN}\n', 1),
    ('[1, 2]\n', 1),
])
def test_event_errors_name_line(tmp_path, text, lineno):
    path = tmp_path / "ev.jsonl"
    path.write_text(text, encoding="utf-8")
    with pytest.raises(IngestError, match=f":{lineno}:"):
        io.read_events(path)


def test_event_csv_bad_header(tmp_path):
    path = tmp_path / "ev.csv"
    path.write_text("who,when\n", encoding="utf-8")
    with pytest.raises(IngestError):
        io.read_events(path)


@tmp_settings
@given(st.dictionaries(ids.filter(lambda s: s.strip() == s and "\n" not in s and "\r" not in s),
                       st.integers(0, 50), max_size=30))
def test_partition_round_trip(tmp_path, assignment):
    path = tmp_path / "p.csv"
    io.write_partition(Partition(assignment), path)
    assert io.read_partition(path).assignment == assignment


def test_partition_numeric_order(tmp_path):
    path = tmp_path / "p.csv"
    io.write_partition(Partition({"10": 0, "2": 1, "b": 0, "a": 1}), path)
    assert path.read_text().splitlines()[1:] == ["2,1", "10,0", "a,1", "b,0"]


@pytest.mark.parametrize("body", ["a,x\n", "a,-1\n", "a,0\na,1\n"])
def test_partition_errors(tmp_path, body):
    path = tmp_path / "p.csv"
    path.write_text("node,community\n" + body)
    with pytest.raises(IngestError):
        io.read_partition(path)


def test_run_round_trip(tmp_path):
    run = simulate(BcsbmParams(n=12, T=4, community_sizes=(6, 6), community_weights=(1, 3), seed=3))
    io.write_run(run, tmp_path)
    assert sorted(p.name for p in tmp_path.iterdir()) == ["activity.jsonl", "params.json", "snapshots.csv", "truth.csv"]
    assert io.read_params(tmp_path / "params.json") == run.params
    assert io.read_events(tmp_path / "activity.jsonl") == run.activity_log
    assert io.read_partition(tmp_path / "truth.csv") == run.ground_truth
    back = io.snapshots_from_rows(io.read_snapshots(tmp_path / "snapshots.csv"))
    assert all(np.array_equal(a, b) for a, b in zip(back, run.snapshots))
    assert len(back) == len(run.snapshots)


def test_snapshot_errors(tmp_path):
    path = tmp_path / "s.csv"
    path.write_text("t,src,dst\nx,1,2\n")
    with pytest.raises(IngestError, match=":2:"):
        io.read_snapshots(path)
    path.write_text("a,b\n")
    with pytest.raises(IngestError):
        io.read_snapshots(path)


def test_degrees(tmp_path):
    path = tmp_path / "deg.txt"
    path.write_text("3\n\n5\n0\n")
    assert io.read_degrees(path).tolist() == [3, 5, 0]
    path.write_text("3\n-1\n")
    with pytest.raises(IngestError, match=":2:"):
        io.read_degrees(path)
    path.write_text("2.5\n")
    with pytest.raises(IngestError):
        io.read_degrees(path)


def test_json_is_stable(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    io.write_json({"b": 1, "a": [1.5, 2]}, a)
    io.write_json({"a": [1.5, 2], "b": 1}, b)
    assert a.read_bytes() == b.read_bytes()
    assert io.read_json(a) == {"a": [1.5, 2], "b": 1}
    with pytest.raises(ValueError):
        io.write_json({"x": float("nan")}, a)


def test_graph_round_trip(tmp_path):
    k = [ProfileKey(e, "d") for e in "cab"]
    g = SimilarityGraph(k, {(k[1], k[2]): 0.25, (k[1], k[0]): 1 / 3})
    path = tmp_path / "g.csv"
    io.write_graph_csv(g, path)
    assert path.read_text().splitlines()[0] == "src,dst,weight"
    assert io.read_graph_csv(path) == [("a", "b", 0.25), ("a", "c", 1 / 3)]


def test_profile_labels():
    single = [ProfileKey("a", "x"), ProfileKey("b", "x")]
    multi = [ProfileKey("a", "x"), ProfileKey("a", "y")]
    assert io.profile_labels(single) == {single[0]: "a", single[1]: "b"}
    assert io.profile_labels(multi) == {multi[0]: "a@x", multi[1]: "a@y"}


def test_params_json_uses_lambda(tmp_path):
    run = simulate(BcsbmParams(n=4, T=1, community_sizes=(2, 2), community_weights=(1, 1), lam=0.25))
    io.write_run(run, tmp_path)
    assert json.loads((tmp_path / "params.json").read_text())["lambda"] == 0.25
