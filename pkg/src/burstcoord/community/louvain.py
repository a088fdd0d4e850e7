"""Louvain modularity optimisation with a resolution parameter.

Modularity of a partition with resolution ``gamma`` is

    Q = sum_c [ in_c / m - gamma * (tot_c / 2m)^2 ]

where ``in_c`` is the edge weight inside community ``c`` (each edge counted
once), ``tot_c`` the summed degree of its members and ``m`` the total edge
weight.
"""

from __future__ import annotations

import numpy as np

from ..errors import ContractError
from .graph import Partition, WeightedGraph

# Moves must beat staying put by this fraction of the node degree. Keeps the
# outcome identical when all weights are multiplied by a constant.
_REL_TOL = 1e-10
_MAX_PASSES = 10_000


class _Level:
    """One level of the aggregation hierarchy; nodes are 0..n-1."""

    __slots__ = ("adj", "loops", "k")

    def __init__(self, adj, loops):
        self.adj = adj
        self.loops = loops
        self.k = [sum(nbrs.values()) + 2.0 * loop for nbrs, loop in zip(adj, loops)]

    def modularity(self, comm, m, gamma) -> float:
        inside = {}
        tot = {}
        for i, nbrs in enumerate(self.adj):
            c = comm[i]
            tot[c] = tot.get(c, 0.0) + self.k[i]
            inside[c] = inside.get(c, 0.0) + self.loops[i]
            for j, w in nbrs.items():
                if j > i and comm[j] == c:
                    inside[c] += w
        return sum(inside[c] / m - gamma * (tot[c] / (2.0 * m)) ** 2 for c in tot)

    def aggregate(self, comm):
        n_new = max(comm) + 1
        adj = [dict() for _ in range(n_new)]
        loops = [0.0] * n_new
        for i, nbrs in enumerate(self.adj):
            ci = comm[i]
            loops[ci] += self.loops[i]
            for j, w in nbrs.items():
                if j <= i:
                    continue
                cj = comm[j]
                if ci == cj:
                    loops[ci] += w
                else:
                    adj[ci][cj] = adj[ci].get(cj, 0.0) + w
                    adj[cj][ci] = adj[cj].get(ci, 0.0) + w
        return _Level(adj, loops)


def _renumber(comm):
    seen = {}
    return [seen.setdefault(c, len(seen)) for c in comm]


def _local_moves(level, m, gamma, rng, debug, trace):
    n = len(level.adj)
    comm = list(range(n))
    tot = list(level.k)
    two_m = 2.0 * m
    q = level.modularity(comm, m, gamma) if (debug or trace is not None) else None
    any_move = False
    for _ in range(_MAX_PASSES):
        moved = 0
        for i in rng.permutation(n):
            ci = comm[i]
            ki = level.k[i]
            links = {}
            for j, w in level.adj[i].items():
                cj = comm[j]
                links[cj] = links.get(cj, 0.0) + w
            tot[ci] -= ki
            best = ci
            best_gain = links.get(ci, 0.0) - gamma * tot[ci] * ki / two_m
            tol = _REL_TOL * ki
            for c, w in links.items():
                gain = w - gamma * tot[c] * ki / two_m
                if gain > best_gain + tol:
                    best, best_gain = c, gain
            tot[best] += ki
            if best != ci:
                comm[i] = best
                moved += 1
                if q is not None:
                    q_new = level.modularity(comm, m, gamma)
                    if debug and q_new < q - 1e-12:
                        raise AssertionError(f"modularity fell from {q} to {q_new} after moving node {i}")
                    q = q_new
                    if trace is not None:
                        trace.append(q)
        if moved == 0:
            break
        any_move = True
    return _renumber(comm), any_move


def louvain(g: WeightedGraph, resolution: float = 1.0, seed: int = 42, *, debug: bool = False, trace: list | None = None) -> Partition:
    """Greedy modularity maximisation (local moves + aggregation).

    Parameters
    ----------
    g : WeightedGraph
        Input graph; needs at least one node.
    resolution : float
        ``gamma`` in the modularity; larger values favour smaller communities.
    seed : int
        Seeds the node visiting order of every local-move pass.
    debug : bool
        Recompute modularity after every accepted move and after every
        aggregation and raise ``AssertionError`` if it ever decreases.
    trace : list, optional
        If given, receives the modularity after every accepted move.

    Returns
    -------
    Partition
        Flat partition of ``g.nodes``.
    """
    if g.n < 1:
        raise ContractError("louvain needs at least one node")
    if not resolution > 0:
        raise ContractError(f"resolution must be positive, got {resolution}")
    m = g.total_weight()
    if m <= 0:
        return Partition.singletons(g.nodes)

    rng = np.random.default_rng(seed)
    level = _Level([dict(nbrs) for nbrs in g.adj], [0.0] * g.n)
    membership = list(range(g.n))
    q_prev = level.modularity(list(range(g.n)), m, resolution) if debug else None
    while True:
        comm, moved = _local_moves(level, m, resolution, rng, debug, trace)
        if not moved:
            break
        membership = [comm[c] for c in membership]
        if debug:
            q_moved = level.modularity(comm, m, resolution)
        level = level.aggregate(comm)
        if debug:
            q = level.modularity(list(range(len(level.adj))), m, resolution)
            if q_moved < q_prev - 1e-12 or q < q_moved - 1e-12:
                raise AssertionError(f"modularity fell across levels: {q_prev} -> {q_moved} -> {q}")
            q_prev = q
    return Partition(dict(zip(g.nodes, membership)))


def modularity(g: WeightedGraph, partition: Partition, resolution: float = 1.0) -> float:
    m = g.total_weight()
    if m <= 0:
        return 0.0
    labels = {}
    comm = [labels.setdefault(partition[node], len(labels)) for node in g.nodes]
    return _Level(g.adj, [0.0] * g.n).modularity(comm, m, resolution)
