"""Similarity network over profiles, weighted by burstiness agreement."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .community import WeightedGraph
from .errors import ParameterError
from .events import ProfileKey, ScoreTable

TRANSFORMS = ("one_minus_ks", "exp_neg_ks")
SPARSIFIERS = ("none", "top_k", "threshold")


def ks_to_weight(ks: float, transform: str = "one_minus_ks", scale: float = 1.0) -> float:
    """Map a KS distance to an edge weight in [0, 1]; smaller KS, larger weight.

    ``exp_neg_ks`` is ``exp(-ks / scale)``.
    """
    if transform == "one_minus_ks":
        return 1.0 - ks
    if transform == "exp_neg_ks":
        if not scale > 0:
            raise ParameterError(f"exp_neg_ks scale must be positive, got {scale}")
        return math.exp(-ks / scale)
    raise ParameterError(f"unknown transform {transform!r}; expected one of {TRANSFORMS}")


@dataclass
class SimilarityGraph:
    nodes: list[ProfileKey]
    weights: dict[tuple[ProfileKey, ProfileKey], float]
    metadata: dict = field(default_factory=dict)

    def weight(self, u, v) -> float:
        key = (u, v) if u < v else (v, u)
        return self.weights.get(key, 0.0)

    def has_edge(self, u, v) -> bool:
        return ((u, v) if u < v else (v, u)) in self.weights

    def to_weighted_graph(self) -> WeightedGraph:
        g = WeightedGraph(self.nodes)
        for (u, v), w in self.weights.items():
            g.add_edge(u, v, w)
        return g

    def edge_rows(self):
        """``(src, dst, weight)`` rows, each pair once with ``src < dst``, sorted."""
        return [(u, v, w) for (u, v), w in sorted(self.weights.items())]

    def __len__(self):
        return len(self.weights)


def _top_k(weights: dict, nodes: list, k: int) -> dict:
    incident = {node: [] for node in nodes}
    for (u, v), w in weights.items():
        incident[u].append((u, v))
        incident[v].append((u, v))
    keep = set()
    for node in nodes:
        # strongest first; equal weights fall back to lexicographic pair order
        ranked = sorted(incident[node], key=lambda pair: (-weights[pair], pair))
        keep.update(ranked[:k])
    return {pair: weights[pair] for pair in sorted(keep)}


def build_similarity_graph(
    scores: ScoreTable,
    transform: str = "one_minus_ks",
    sparsify: str = "none",
    *,
    scale: float = 1.0,
    k: int | None = None,
    theta: float | None = None,
) -> SimilarityGraph:
    """Turn pairwise KS scores into a weighted similarity graph.

    Parameters
    ----------
    scores : ScoreTable
        Output of :func:`burstcoord.events.pairwise_ks`. Unscored pairs (for
        example same-domain pairs in cross-domain mode) get no edge.
    transform : {"one_minus_ks", "exp_neg_ks"}
        KS-to-weight map; ``scale`` parametrises ``exp_neg_ks``.
    sparsify : {"none", "top_k", "threshold"}
        ``top_k`` keeps the union over nodes of each node's ``k`` heaviest
        edges; ``threshold`` keeps edges with weight ``>= theta``.
    """
    if sparsify not in SPARSIFIERS:
        raise ParameterError(f"unknown sparsifier {sparsify!r}; expected one of {SPARSIFIERS}")
    if sparsify == "top_k" and (k is None or k <= 0):
        raise ParameterError(f"top_k needs k > 0, got {k}")
    if sparsify == "threshold" and (theta is None or not 0.0 <= theta <= 1.0):
        raise ParameterError(f"threshold needs theta in [0, 1], got {theta}")

    weights = {}
    for u, v, ks in scores.pairs():
        w = ks_to_weight(ks, transform, scale)
        weights[(u, v) if u < v else (v, u)] = min(max(w, 0.0), 1.0)

    nodes = list(scores.keys)
    if sparsify == "top_k":
        weights = _top_k(weights, nodes, k)
    elif sparsify == "threshold":
        weights = {pair: w for pair, w in weights.items() if w >= theta}

    metadata = {"transform": transform, "sparsify": sparsify}
    if transform == "exp_neg_ks":
        metadata["scale"] = scale
    if sparsify == "top_k":
        metadata["k"] = k
    elif sparsify == "threshold":
        metadata["theta"] = theta
    return SimilarityGraph(nodes, weights, metadata)
