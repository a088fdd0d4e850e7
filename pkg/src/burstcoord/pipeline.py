"""End-to-end detectors: burstiness similarity and data-plane structure."""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass, field

from .community import Partition, WeightedGraph, ari, label_propagation, louvain, nmi
from .errors import ContractError, InsufficientDataError
from .events import DEFAULT_MIN_EVENTS, Event, EventLog, build_profiles, pairwise_ks
from .io import profile_labels
from .simgraph import build_similarity_graph

STRUCTURAL_METHODS = ("louvain_edges", "lpa_edges")


@dataclass
class Detection:
    partition: Partition
    params: dict
    omitted: list = field(default_factory=list)
    graph: object = None


def detect_bursty(
    events: Iterable[Event],
    *,
    min_events: int = DEFAULT_MIN_EVENTS,
    transform: str = "one_minus_ks",
    scale: float = 1.0,
    sparsify: str = "none",
    k: int | None = None,
    theta: float | None = None,
    resolution: float = 1.0,
    seed: int = 42,
    cross_domain_only: bool = False,
    keep_zeros: bool = False,
) -> Detection:
    """Profiles -> pairwise KS -> similarity graph -> Louvain.

    Nodes of the returned partition are named by
    :func:`burstcoord.io.profile_labels` (bare entity ids for single-domain
    input).
    """
    events = list(events)
    log = EventLog(events, (0.0, float("inf")))
    profiles = build_profiles(log, min_events, keep_zeros=keep_zeros)
    if len(profiles) < 2:
        raise InsufficientDataError(f"insufficient profiles: {len(profiles)} with at least {min_events} events")
    scores = pairwise_ks(profiles, cross_domain_only=cross_domain_only)
    sim = build_similarity_graph(scores, transform, sparsify, scale=scale, k=k, theta=theta)
    found = louvain(sim.to_weighted_graph(), resolution, seed)
    labels = profile_labels(profiles)
    partition = Partition({labels[key]: c for key, c in found.assignment.items()})
    params = {
        "method": "bursty",
        "min_events": min_events,
        "keep_zeros": keep_zeros,
        "cross_domain_only": cross_domain_only,
        "resolution": resolution,
        "seed": seed,
        "n_profiles": len(profiles),
        "n_omitted": len(profiles.omitted),
        **sim.metadata,
    }
    return Detection(partition, params, list(profiles.omitted), sim)


def edge_graph(edges: Iterable[tuple], nodes: Iterable = ()) -> WeightedGraph:
    """Aggregate directed snapshot edges into an undirected multiplicity graph."""
    g = WeightedGraph(nodes)
    for src, dst in edges:
        if src != dst:
            g.add_edge(src, dst, 1.0)
        else:
            g.add_node(src)
    return g


def detect_structural(g: WeightedGraph, method: str, *, resolution: float = 1.0, seed: int = 42,
                      max_iters: int = 100) -> Detection:
    if method == "louvain_edges":
        part = louvain(g, resolution, seed)
        params = {"method": method, "resolution": resolution, "seed": seed}
    elif method == "lpa_edges":
        part = label_propagation(g, seed, max_iters)
        params = {"method": method, "seed": seed, "max_iters": max_iters}
    else:
        raise ContractError(f"unknown structural method {method!r}; expected one of {STRUCTURAL_METHODS}")
    return Detection(part, params, graph=g)


def expand_truth(truth: Partition, nodes: Iterable) -> Partition:
    """Give ``entity@domain`` profile nodes the label of their entity.

    Entities that were expanded into profiles are replaced by them, so a
    multi-domain prediction is scored profile by profile.
    """
    expanded = {}
    covered = set()
    for node in nodes:
        if node in truth.assignment or not isinstance(node, str) or "@" not in node:
            continue
        entity = node.rsplit("@", 1)[0]
        if entity in truth.assignment:
            expanded[node] = truth[entity]
            covered.add(entity)
    assignment = {n: c for n, c in truth.assignment.items() if n not in covered}
    assignment.update(expanded)
    return Partition(assignment)


def evaluate(pred: Partition, truth: Partition) -> dict:
    """NMI/ARI over the nodes both partitions know about."""
    truth = expand_truth(truth, pred.assignment)
    common = sorted(pred.nodes() & truth.nodes(), key=str)
    if not common:
        raise InsufficientDataError("prediction and truth share no nodes")
    p, t = pred.restrict(common), truth.restrict(common)
    return {
        "nmi": nmi(p, t),
        "ari": ari(p, t),
        "n_pred_communities": p.n_communities,
        "n_true_communities": t.n_communities,
        "n_evaluated": len(common),
        "n_excluded": len(pred.nodes() | truth.nodes()) - len(common),
    }
