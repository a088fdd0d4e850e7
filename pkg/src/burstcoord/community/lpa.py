from __future__ import annotations

import numpy as np

from ..errors import ContractError
from .graph import Partition, WeightedGraph

DEFAULT_MAX_ITERS = 100


def label_propagation(g: WeightedGraph, seed: int = 42, max_iters: int = DEFAULT_MAX_ITERS) -> Partition:
    """Asynchronous label propagation.

    Every node starts in its own community. Each iteration visits the nodes
    in a freshly shuffled order and lets each adopt the label carrying the
    largest summed edge weight among its neighbours. A node whose current
    label is already among the heaviest keeps it; otherwise ties are broken
    uniformly at random. Iteration stops once a full sweep changes nothing.
    """
    if g.n < 1:
        raise ContractError("label propagation needs at least one node")
    rng = np.random.default_rng(seed)
    labels = list(range(g.n))
    for _ in range(max_iters):
        changed = 0
        for i in rng.permutation(g.n):
            nbrs = g.adj[i]
            if not nbrs:
                continue
            score = {}
            for j, w in nbrs.items():
                score[labels[j]] = score.get(labels[j], 0.0) + w
            top = max(score.values())
            best = [lab for lab, s in score.items() if s == top]
            if labels[i] in best:
                continue
            labels[i] = best[0] if len(best) == 1 else best[int(rng.integers(len(best)))]
            changed += 1
        if changed == 0:
            break
    return Partition(dict(zip(g.nodes, labels)))
