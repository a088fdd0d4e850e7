"""Readers and writers for every on-disk format the package produces."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .bcsbm import BcsbmParams, TemporalGraphRun
from .community import Partition
from .errors import IngestError
from .events import Event, ProfileKey


def read_events(path) -> list[Event]:
    """Read a JSON-lines or CSV (``entity,domain,t``) event file.

    The format follows the extension: ``.csv`` is CSV, anything else JSON
    lines. Errors name the 1-based line number.
    """
    path = Path(path)
    if path.suffix.lower() == ".csv":
        return _read_events_csv(path)
    events = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise IngestError(f"{path}:{lineno}: malformed JSON ({exc.msg})") from exc
            events.append(_event_from(rec, f"{path}:{lineno}"))
    return events


def _read_events_csv(path: Path) -> list[Event]:
    events = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"entity", "domain", "t"} <= set(reader.fieldnames):
            raise IngestError(f"{path}:1: expected header entity,domain,t")
        for rec in reader:
            events.append(_event_from(rec, f"{path}:{reader.line_num}"))
    return events


def _event_from(rec, where: str) -> Event:
    if not isinstance(rec, dict):
        raise IngestError(f"{where}: expected an object with entity, domain, t")
    try:
        entity, domain, t = rec["entity"], rec["domain"], rec["t"]
    except KeyError as exc:
        raise IngestError(f"{where}: missing field {exc.args[0]!r}") from exc
    if isinstance(t, bool):
        raise IngestError(f"{where}: t must be a number")
    try:
        t = float(t)
    except (TypeError, ValueError) as exc:
        raise IngestError(f"{where}: t={t!r} is not a number") from exc
    try:
        return Event(str(entity), str(domain), t)
    except IngestError as exc:
        raise IngestError(f"{where}: {exc}") from exc


def write_events(events, path):
    with open(path, "w", encoding="utf-8") as fh:
        for ev in events:
            fh.write(json.dumps({"entity": ev.entity, "domain": ev.domain, "t": ev.t}) + "\n")


def _node_sort_key(node):
    s = str(node)
    return (0, int(s), s) if s.isdigit() else (1, 0, s)


def write_partition(partition: Partition, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["node", "community"])
        for node in sorted(partition.assignment, key=_node_sort_key):
            w.writerow([node, partition[node]])


def read_partition(path) -> Partition:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"node", "community"} <= set(reader.fieldnames):
            raise IngestError(f"{path}:1: expected header node,community")
        assignment = {}
        for rec in reader:
            try:
                label = int(rec["community"])
            except (TypeError, ValueError) as exc:
                raise IngestError(f"{path}:{reader.line_num}: bad community {rec['community']!r}") from exc
            if label < 0:
                raise IngestError(f"{path}:{reader.line_num}: negative community label")
            if rec["node"] in assignment:
                raise IngestError(f"{path}:{reader.line_num}: duplicate node {rec['node']!r}")
            assignment[rec["node"]] = label
    return Partition(assignment)


def write_snapshots(snapshots, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "src", "dst"])
        for t, edges in enumerate(snapshots):
            for src, dst in edges:
                w.writerow([t, int(src), int(dst)])


def read_snapshots(path) -> list[tuple[int, str, str]]:
    """Rows ``(t, src, dst)`` in file order; node ids stay strings."""
    rows = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"t", "src", "dst"} <= set(reader.fieldnames):
            raise IngestError(f"{path}:1: expected header t,src,dst")
        for rec in reader:
            try:
                t = int(rec["t"])
            except (TypeError, ValueError) as exc:
                raise IngestError(f"{path}:{reader.line_num}: bad t {rec['t']!r}") from exc
            if not rec["src"] or not rec["dst"]:
                raise IngestError(f"{path}:{reader.line_num}: empty endpoint")
            rows.append((t, rec["src"], rec["dst"]))
    return rows


def snapshots_from_rows(rows) -> list[np.ndarray]:
    """Regroup integer-id snapshot rows into per-step ``(k, 2)`` arrays."""
    if not rows:
        return []
    T = max(t for t, _, _ in rows) + 1
    buckets = [[] for _ in range(T)]
    for t, src, dst in rows:
        buckets[t].append((int(src), int(dst)))
    return [np.asarray(b, dtype=np.int64).reshape(-1, 2) for b in buckets]


def read_degrees(path) -> np.ndarray:
    values = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            s = line.strip()
            if not s:
                continue
            try:
                v = int(s)
            except ValueError as exc:
                raise IngestError(f"{path}:{lineno}: {s!r} is not an integer degree") from exc
            if v < 0:
                raise IngestError(f"{path}:{lineno}: negative degree")
            values.append(v)
    return np.asarray(values, dtype=np.int64)


def write_json(obj, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def write_run(run: TemporalGraphRun, out_dir):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_snapshots(run.snapshots, out / "snapshots.csv")
    write_events(run.activity_log, out / "activity.jsonl")
    write_partition(run.ground_truth, out / "truth.csv")
    write_json(run.params.to_dict(), out / "params.json")


def read_params(path) -> BcsbmParams:
    return BcsbmParams.from_dict(read_json(path))


def profile_labels(keys) -> dict[ProfileKey, str]:
    """Node names for output files: the bare entity when every profile lives
    in a single domain, ``entity@domain`` otherwise."""
    keys = list(keys)
    if len({k.domain for k in keys}) <= 1:
        return {k: k.entity for k in keys}
    return {k: k.label() for k in keys}


def write_graph_csv(graph, path):
    labels = profile_labels(graph.nodes)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["src", "dst", "weight"])
        for u, v, weight in graph.edge_rows():
            w.writerow([labels[u], labels[v], repr(weight)])


def read_graph_csv(path) -> list[tuple[str, str, float]]:
    rows = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        for rec in reader:
            weight = float(rec["weight"])
            if not math.isfinite(weight):
                raise IngestError(f"{path}:{reader.line_num}: non-finite weight")
            rows.append((rec["src"], rec["dst"], weight))
    return rows
