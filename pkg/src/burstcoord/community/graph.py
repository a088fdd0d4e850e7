from __future__ import annotations

from collections.abc import Hashable, Iterable, Mapping
from dataclasses import dataclass, field

from ..errors import ContractError


class WeightedGraph:
    """Undirected graph with non-negative edge weights.

    Repeated :meth:`add_edge` calls on the same pair accumulate, so a
    multigraph can be stored as edge multiplicities. Self-loops are refused;
    they only arise inside Louvain's aggregation, which keeps its own arrays.
    """

    def __init__(self, nodes: Iterable[Hashable] = ()):
        self.nodes: list = []
        self._index: dict = {}
        self.adj: list[dict[int, float]] = []
        for node in nodes:
            self.add_node(node)

    @classmethod
    def from_edges(cls, edges: Iterable[tuple], nodes: Iterable[Hashable] = ()) -> "WeightedGraph":
        g = cls(nodes)
        for edge in edges:
            if len(edge) == 2:
                g.add_edge(edge[0], edge[1], 1.0)
            else:
                g.add_edge(edge[0], edge[1], edge[2])
        return g

    def add_node(self, node) -> int:
        if node not in self._index:
            self._index[node] = len(self.nodes)
            self.nodes.append(node)
            self.adj.append({})
        return self._index[node]

    def add_edge(self, u, v, weight: float = 1.0):
        if u == v:
            raise ContractError(f"self-loop on {u!r}")
        if not weight >= 0:
            raise ContractError(f"negative or NaN weight {weight!r} on ({u!r}, {v!r})")
        i, j = self.add_node(u), self.add_node(v)
        self.adj[i][j] = self.adj[i].get(j, 0.0) + weight
        self.adj[j][i] = self.adj[j].get(i, 0.0) + weight

    def index(self, node) -> int:
        return self._index[node]

    def weight(self, u, v) -> float:
        return self.adj[self._index[u]].get(self._index[v], 0.0)

    def degree(self, node) -> float:
        return sum(self.adj[self._index[node]].values())

    def edges(self):
        for i, nbrs in enumerate(self.adj):
            for j, w in nbrs.items():
                if i < j:
                    yield self.nodes[i], self.nodes[j], w

    @property
    def n(self) -> int:
        return len(self.nodes)

    def total_weight(self) -> float:
        """Sum of edge weights, i.e. ``m`` in ``2m = sum of degrees``."""
        return sum(w for _, _, w in self.edges())

    def scaled(self, c: float) -> "WeightedGraph":
        g = WeightedGraph(self.nodes)
        for u, v, w in self.edges():
            g.add_edge(u, v, w * c)
        return g

    def __repr__(self):
        return f"WeightedGraph(n={self.n}, edges={sum(1 for _ in self.edges())})"


@dataclass
class Partition:
    """Assignment of nodes to integer community labels."""

    assignment: dict = field(default_factory=dict)

    def __post_init__(self):
        for node, label in self.assignment.items():
            if int(label) != label or label < 0:
                raise ContractError(f"label {label!r} for node {node!r} is not a non-negative integer")
        self.assignment = {node: int(label) for node, label in self.assignment.items()}

    @classmethod
    def from_groups(cls, groups: Iterable[Iterable[Hashable]]) -> "Partition":
        return cls({node: c for c, group in enumerate(groups) for node in group})

    @classmethod
    def singletons(cls, nodes: Iterable[Hashable]) -> "Partition":
        return cls({node: i for i, node in enumerate(nodes)})

    @property
    def n(self) -> int:
        return len(self.assignment)

    @property
    def n_communities(self) -> int:
        return len(set(self.assignment.values()))

    def nodes(self) -> set:
        return set(self.assignment)

    def groups(self) -> list[set]:
        by_label: dict[int, set] = {}
        for node, label in self.assignment.items():
            by_label.setdefault(label, set()).add(node)
        return [by_label[k] for k in sorted(by_label)]

    def restrict(self, nodes: Iterable[Hashable]) -> "Partition":
        return Partition({node: self.assignment[node] for node in nodes})

    def relabeled(self, mapping: Mapping[int, int]) -> "Partition":
        return Partition({node: mapping[label] for node, label in self.assignment.items()})

    def canonical(self) -> "Partition":
        """Relabel communities 0..k-1 in order of their smallest member."""
        order = sorted(self.groups(), key=lambda g: min(map(str, g)))
        return Partition({node: c for c, group in enumerate(order) for node in group})

    def same_as(self, other: "Partition") -> bool:
        """True when both describe the same grouping, ignoring label ids."""
        if self.nodes() != other.nodes():
            return False
        return sorted(map(_group_key, self.groups())) == sorted(map(_group_key, other.groups()))

    def __getitem__(self, node) -> int:
        return self.assignment[node]

    def __len__(self):
        return len(self.assignment)


def _group_key(group) -> tuple:
    return tuple(sorted(map(repr, group)))
