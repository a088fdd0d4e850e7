import itertools

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn.metrics import adjusted_rand_score, normalized_mutual_info_score

from burstcoord import ContractError, Partition, WeightedGraph, ari, label_propagation, louvain, modularity, nmi


def clique_edges(nodes):
    return [(u, v) for u, v in itertools.combinations(nodes, 2)]


def two_cliques(bridge=True):
    edges = clique_edges(range(5)) + clique_edges(range(5, 10))
    if bridge:
        edges.append((4, 5))
    return WeightedGraph.from_edges(edges, nodes=range(10))


def set_partitions(n):
    """All restricted growth strings of length n, one per set partition."""
    out = []

    def grow(prefix, top):
        if len(prefix) == n:
            out.append(prefix)
            return
        for c in range(top + 2):
            grow(prefix + [c], max(top, c))

    grow([0], 0)
    return np.array(out)


def best_modularity_partition(g, gamma=1.0):
    """Exhaustive search: modularity of every set partition of the nodes."""
    n = g.n
    A = np.zeros((n, n))
    for u, v, w in g.edges():
        A[g.index(u), g.index(v)] = A[g.index(v), g.index(u)] = w
    k = A.sum(axis=1)
    two_m = k.sum()
    B = A - gamma * np.outer(k, k) / two_m
    rgs = set_partitions(n)
    same = rgs[:, :, None] == rgs[:, None, :]
    q = (same * B).sum(axis=(1, 2)) / two_m
    best = rgs[np.argmax(q)]
    return Partition(dict(zip(g.nodes, best.tolist()))), float(q.max()), q


def to_nx(g):
    h = nx.Graph()
    h.add_nodes_from(g.nodes)
    h.add_weighted_edges_from(g.edges())
    return h


def random_graph(rng, n, p):
    g = WeightedGraph(range(n))
    for u, v in itertools.combinations(range(n), 2):
        if rng.random() < p:
            g.add_edge(u, v, float(rng.uniform(0.1, 3)))
    return g


def planted(rng, sizes, p_in, p_out):
    comm = np.repeat(np.arange(len(sizes)), sizes)
    g = WeightedGraph(range(len(comm)))
    for u, v in itertools.combinations(range(len(comm)), 2):
        if rng.random() < (p_in if comm[u] == comm[v] else p_out):
            g.add_edge(u, v)
    return g, Partition(dict(enumerate(comm.tolist())))


class TestGraph:
    def test_edges_accumulate(self):
        g = WeightedGraph()
        g.add_edge("a", "b", 1.0)
        g.add_edge("b", "a", 2.0)
        assert g.weight("a", "b") == 3.0
        assert g.total_weight() == 3.0
        assert g.degree("a") == 3.0

    def test_rejects_self_loops_and_negative(self):
        g = WeightedGraph()
        with pytest.raises(ContractError):
            g.add_edge("a", "a")
        with pytest.raises(ContractError):
            g.add_edge("a", "b", -1.0)


class TestPartition:
    def test_labels_validated(self):
        with pytest.raises(ContractError):
            Partition({"a": -1})
        with pytest.raises(ContractError):
            Partition({"a": 0.5})

    def test_same_as_ignores_labels(self):
        a = Partition({"x": 0, "y": 0, "z": 7})
        b = Partition({"x": 3, "y": 3, "z": 1})
        assert a.same_as(b)
        assert not a.same_as(Partition({"x": 0, "y": 1, "z": 1}))

    def test_canonical(self):
        p = Partition({"b": 5, "a": 9, "c": 9}).canonical()
        assert p.assignment == {"a": 0, "c": 0, "b": 1}


class TestModularityOracle:
    def test_enumeration_size(self):
        assert len(set_partitions(10)) == 115975  # Bell number B10

    def test_two_cliques_plus_bridge_is_the_maximum(self):
        g = two_cliques()
        best, q_best, _ = best_modularity_partition(g)
        cliques = Partition.from_groups([range(5), range(5, 10)])
        assert best.same_as(cliques)
        assert modularity(g, cliques) == pytest.approx(q_best, abs=1e-12)

    @pytest.mark.parametrize("seed", range(5))
    def test_louvain_recovers_two_cliques(self, seed):
        g = two_cliques()
        assert louvain(g, seed=seed).same_as(Partition.from_groups([range(5), range(5, 10)]))

    def test_louvain_reaches_exhaustive_optimum_on_small_graphs(self):
        rng = np.random.default_rng(5)
        for _ in range(3):
            g = random_graph(rng, 9, 0.35)
            if g.total_weight() == 0:
                continue
            _, q_best, _ = best_modularity_partition(g)
            q = modularity(g, louvain(g, seed=1))
            # Louvain is a heuristic, but on 9 nodes it should be close to optimal
            assert q <= q_best + 1e-12
            assert q >= q_best - 0.02

    def test_matches_networkx_modularity(self):
        rng = np.random.default_rng(1)
        for gamma in (0.5, 1.0, 2.0):
            g = random_graph(rng, 20, 0.3)
            labels = rng.integers(0, 4, g.n)
            part = Partition(dict(zip(g.nodes, labels.tolist())))
            ref = nx.community.modularity(to_nx(g), part.groups(), weight="weight", resolution=gamma)
            assert modularity(g, part, gamma) == pytest.approx(ref, abs=1e-12)


class TestLouvain:
    def test_edgeless(self):
        g = WeightedGraph(range(4))
        assert louvain(g).same_as(Partition.singletons(range(4)))

    def test_single_clique(self):
        g = WeightedGraph.from_edges(clique_edges(range(6)))
        assert louvain(g).n_communities == 1

    def test_single_node(self):
        assert louvain(WeightedGraph(["x"])).assignment == {"x": 0}

    def test_preconditions(self):
        with pytest.raises(ContractError):
            louvain(WeightedGraph())
        with pytest.raises(ContractError):
            louvain(two_cliques(), resolution=0)

    def test_disconnected_cliques(self):
        assert louvain(two_cliques(bridge=False)).n_communities == 2

    def test_debug_trace_non_decreasing(self):
        rng = np.random.default_rng(2)
        for _ in range(5):
            g, _ = planted(rng, (15, 15, 15), 0.4, 0.05)
            trace = []
            louvain(g, seed=3, debug=True, trace=trace)
            assert trace
            assert all(b >= a - 1e-12 for a, b in zip(trace, trace[1:]))

    def test_resolution_controls_granularity(self):
        rng = np.random.default_rng(4)
        g, _ = planted(rng, (10,) * 6, 0.7, 0.1)
        low = louvain(g, resolution=0.2, seed=1).n_communities
        high = louvain(g, resolution=3.0, seed=1).n_communities
        assert low < high

    def test_planted_recovery(self):
        rng = np.random.default_rng(8)
        g, truth = planted(rng, (20, 20, 20), 0.5, 0.02)
        assert nmi(louvain(g, seed=0), truth) > 0.95

    def test_comparable_to_networkx(self):
        rng = np.random.default_rng(9)
        g, _ = planted(rng, (25, 25, 25, 25), 0.3, 0.05)
        ours = modularity(g, louvain(g, seed=0))
        theirs = nx.community.modularity(to_nx(g), nx.community.louvain_communities(to_nx(g), seed=0))
        assert ours >= theirs - 0.01

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**31 - 1), st.floats(0.01, 1000), st.integers(0, 100))
    def test_weight_scaling_invariance(self, graph_seed, c, seed):
        g = random_graph(np.random.default_rng(graph_seed), 25, 0.2)
        a = louvain(g, seed=seed)
        b = louvain(g.scaled(c), seed=seed)
        assert a.assignment == b.assignment

    def test_deterministic(self):
        rng = np.random.default_rng(10)
        g, _ = planted(rng, (12, 12, 12), 0.3, 0.1)
        assert louvain(g, seed=5).assignment == louvain(g, seed=5).assignment


class TestLabelPropagation:
    def test_disconnected_cliques(self):
        assert label_propagation(two_cliques(bridge=False)).n_communities == 2

    @pytest.mark.parametrize("seed", range(20))
    def test_star_converges_to_one_label(self, seed):
        g = WeightedGraph.from_edges([(0, leaf) for leaf in range(1, 6)])
        assert label_propagation(g, seed=seed).n_communities == 1

    def test_zero_iterations(self):
        g = two_cliques()
        assert label_propagation(g, max_iters=0).same_as(Partition.singletons(g.nodes))

    def test_isolated_node_keeps_own_label(self):
        g = WeightedGraph.from_edges(clique_edges(range(4)), nodes=range(5))
        part = label_propagation(g)
        assert part.n_communities == 2

    def test_deterministic(self):
        rng = np.random.default_rng(3)
        g, _ = planted(rng, (15, 15), 0.4, 0.05)
        assert label_propagation(g, seed=9).assignment == label_propagation(g, seed=9).assignment

    def test_planted_recovery(self):
        rng = np.random.default_rng(6)
        g, truth = planted(rng, (20, 20, 20), 0.6, 0.01)
        assert nmi(label_propagation(g, seed=0), truth) > 0.9


P = Partition


class TestMetrics:
    ab_cd = P({"a": 0, "b": 0, "c": 1, "d": 1})
    ac_bd = P({"a": 0, "c": 0, "b": 1, "d": 1})

    def test_crossed_halves(self):
        assert nmi(self.ab_cd, self.ac_bd) == 0.0
        assert ari(self.ab_cd, self.ac_bd) == -0.5

    def test_identity(self):
        assert nmi(self.ab_cd, self.ab_cd) == 1.0
        assert ari(self.ab_cd, self.ab_cd) == 1.0

    def test_against_single_community(self):
        one = P(dict.fromkeys("abcd", 0))
        assert nmi(self.ab_cd, one) == 0.0
        assert ari(self.ab_cd, one) == 0.0
        assert ari(one, self.ab_cd) == 0.0

    def test_both_trivial(self):
        one = P(dict.fromkeys("abcd", 0))
        assert nmi(one, one) == 1.0
        assert ari(one, one) == 1.0

    def test_all_singletons(self):
        s = P.singletons("abcd")
        assert nmi(s, s) == 1.0
        assert ari(s, s) == 1.0

    def test_relabeled(self):
        assert nmi(self.ab_cd, self.ab_cd.relabeled({0: 7, 1: 3})) == 1.0

    def test_mismatched_nodes(self):
        with pytest.raises(ContractError):
            nmi(self.ab_cd, P({"a": 0, "b": 0, "c": 1, "e": 1}))
        with pytest.raises(ContractError):
            ari(self.ab_cd, P({"a": 0}))

    def test_against_sklearn(self):
        rng = np.random.default_rng(12)
        for _ in range(100):
            n = int(rng.integers(2, 60))
            x = rng.integers(0, rng.integers(1, 8), n)
            y = rng.integers(0, rng.integers(1, 8), n)
            px, py = P(dict(enumerate(x.tolist()))), P(dict(enumerate(y.tolist())))
            assert ari(px, py) == pytest.approx(adjusted_rand_score(x, y), abs=1e-12)
            if len(set(x)) > 1 or len(set(y)) > 1:
                assert nmi(px, py) == pytest.approx(normalized_mutual_info_score(x, y), abs=1e-12)

    @settings(max_examples=100)
    @given(st.lists(st.integers(0, 5), min_size=2, max_size=40), st.data())
    def test_invariances(self, xs, data):
        ys = data.draw(st.lists(st.integers(0, 5), min_size=len(xs), max_size=len(xs)))
        x, y = P(dict(enumerate(xs))), P(dict(enumerate(ys)))
        perm = data.draw(st.permutations(range(6)))
        xp = x.relabeled(dict(enumerate(perm)))
        v = nmi(x, y)
        assert 0.0 <= v <= 1.0
        assert ari(x, y) <= 1.0
        assert v == pytest.approx(nmi(y, x), abs=1e-12)
        assert ari(x, y) == pytest.approx(ari(y, x), abs=1e-12)
        assert nmi(xp, y) == pytest.approx(v, abs=1e-12)
        assert ari(xp, y) == pytest.approx(ari(x, y), abs=1e-12)
        if x.n_communities >= 2:
            assert nmi(x, x) == 1.0
