import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from episim.errors import (
    GraphInputError,
    NodeBoundsError,
    PartitionCoverageError,
    UndefinedRatioError,
)
from episim.graph import (
    Graph,
    Partition,
    build_from_edges,
    degree,
    inter_community_fraction,
    mu_limit,
    remove_nodes,
    split_degree,
)

from conftest import random_simple_graph


class TestBuildFromEdges:
    def test_path_graph(self):
        g = build_from_edges([(0, 1), (1, 2)])
        assert g.node_count == 3
        assert g.edge_count == 2
        assert g.neighbors(1) == (0, 2)

    def test_edgeless_with_node_count(self):
        g = build_from_edges([], node_count=3)
        assert g.node_count == 3
        assert g.edge_count == 0

    def test_duplicate_under_symmetry_rejected(self):
        with pytest.raises(GraphInputError):
            build_from_edges([(0, 1), (1, 0)])

    def test_duplicate_same_orientation_rejected(self):
        with pytest.raises(GraphInputError):
            build_from_edges([(0, 1), (0, 1)])

    def test_self_loop_rejected(self):
        with pytest.raises(GraphInputError):
            build_from_edges([(2, 2)])

    def test_negative_id_rejected(self):
        with pytest.raises(GraphInputError):
            build_from_edges([(-1, 0)])

    def test_node_count_too_small_rejected(self):
        with pytest.raises(GraphInputError):
            build_from_edges([(0, 5)], node_count=3)

    def test_symmetry_and_sorted_neighbors(self):
        g = build_from_edges([(3, 1), (0, 3), (2, 3)])
        assert g.neighbors(3) == (0, 1, 2)
        for u in range(g.node_count):
            for v in g.neighbors(u):
                assert u in g.neighbors(v)


class TestDegree:
    def test_path_middle(self):
        g = build_from_edges([(0, 1), (1, 2)])
        assert degree(g, 1) == 2

    def test_isolated(self):
        g = build_from_edges([(0, 1)], node_count=3)
        assert degree(g, 2) == 0

    def test_unknown_node(self):
        g = build_from_edges([(0, 1)])
        with pytest.raises(NodeBoundsError):
            degree(g, 17)


class TestSplitDegree:
    def test_triangle_single_community(self):
        g = build_from_edges([(0, 1), (1, 2), (0, 2)])
        p = Partition([0, 0, 0])
        for i in range(3):
            assert split_degree(g, p, i) == (2, 0)

    def test_four_cycle_two_communities(self):
        g = build_from_edges([(0, 1), (1, 2), (2, 3), (3, 0)])
        p = Partition([0, 0, 1, 1])
        assert split_degree(g, p, 1) == (1, 1)

    def test_coverage_error(self):
        g = build_from_edges([(0, 1), (1, 2)])
        with pytest.raises(PartitionCoverageError):
            split_degree(g, Partition([0, 0]), 1)

    def test_additivity_on_random_graphs(self):
        rng = np.random.default_rng(99)
        for _ in range(10):
            n = int(rng.integers(4, 30))
            g = random_simple_graph(rng, n, 3 * n)
            p = Partition([int(c) for c in rng.integers(3, size=n)])
            for i in range(n):
                ks = split_degree(g, p, i)
                # independent recount straight off the neighbor list
                k_in = sum(1 for j in g.neighbors(i) if p.community(j) == p.community(i))
                assert ks.k_in == k_in
                assert ks.k_in + ks.k_out == degree(g, i)

    def test_kout_sum_is_twice_cross_edges(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            n = int(rng.integers(4, 40))
            g = random_simple_graph(rng, n, 2 * n)
            p = Partition([int(c) for c in rng.integers(4, size=n)])
            kout_total = sum(split_degree(g, p, i).k_out for i in range(n))
            cross = sum(
                1 for u, v in g.iter_edges() if p.community(u) != p.community(v)
            )
            assert kout_total == 2 * cross


class TestInterCommunityFraction:
    def test_single_community(self):
        g = build_from_edges([(0, 1), (1, 2)])
        assert inter_community_fraction(g, Partition([0, 0, 0])) == 0.0

    def test_complete_bipartite(self):
        edges = [(u, v) for u in range(3) for v in range(3, 6)]
        g = build_from_edges(edges)
        assert inter_community_fraction(g, Partition([0, 0, 0, 1, 1, 1])) == 1.0

    def test_empty_graph_undefined(self):
        g = build_from_edges([], node_count=2)
        with pytest.raises(UndefinedRatioError):
            inter_community_fraction(g, Partition([0, 1]))


class TestMuLimit:
    def test_benchmark_arithmetic(self):
        g = build_from_edges([], node_count=7500)
        labels = [0] * 180 + [1 + i % 300 for i in range(7320)]
        assert mu_limit(g, Partition(labels)) == pytest.approx((7500 - 180) / 7500)
        assert mu_limit(g, Partition(labels)) == pytest.approx(0.976)

    def test_single_community(self):
        g = build_from_edges([(0, 1)], node_count=4)
        assert mu_limit(g, Partition([0, 0, 0, 0])) == 0.0

    def test_small_case(self):
        g = build_from_edges([], node_count=10)
        labels = [0] * 4 + [1] * 3 + [2] * 3
        assert mu_limit(g, Partition(labels)) == pytest.approx(0.6)

    @given(sizes=st.lists(st.integers(min_value=1, max_value=30), min_size=2, max_size=6))
    @settings(max_examples=50, deadline=None)
    def test_decreases_as_largest_community_grows(self, sizes):
        labels = [c for c, size in enumerate(sizes) for _ in range(size)]
        n = len(labels)
        g = build_from_edges([], node_count=n)
        base = mu_limit(g, Partition(labels))
        # grow the largest community by absorbing one node from another
        largest = max(range(len(sizes)), key=lambda c: sizes[c])
        donor = next((c for c in range(len(sizes)) if c != largest and sizes[c] > 0), None)
        if donor is None:
            return
        labels[labels.index(donor)] = largest
        assert mu_limit(g, Partition(labels)) < base


class TestRemoveNodes:
    def test_star_center_removal(self):
        g = build_from_edges([(0, i) for i in range(1, 5)])
        h = remove_nodes(g, {0})
        assert h.edge_count == 0
        assert h.node_count == 5
        assert h.removed == frozenset({0})

    def test_remove_empty_set_is_identity(self):
        g = build_from_edges([(0, 1), (1, 2)])
        assert remove_nodes(g, set()) == g

    def test_triangle_leaves_one_edge(self):
        g = build_from_edges([(0, 1), (1, 2), (0, 2)])
        h = remove_nodes(g, {2})
        assert list(h.iter_edges()) == [(0, 1)]

    def test_original_unmodified(self):
        g = build_from_edges([(0, 1), (1, 2)])
        remove_nodes(g, {1})
        assert g.edge_count == 2
        assert g.removed == frozenset()

    def test_idempotent(self):
        g = build_from_edges([(0, 1), (1, 2), (0, 2), (2, 3)])
        once = remove_nodes(g, {1, 2})
        twice = remove_nodes(once, {1, 2})
        assert once == twice

    def test_unknown_id_rejected(self):
        g = build_from_edges([(0, 1)])
        with pytest.raises(NodeBoundsError):
            remove_nodes(g, {5})

    def test_active_accounting(self):
        g = build_from_edges([(0, 1), (1, 2), (2, 3)])
        h = remove_nodes(g, {1})
        assert h.active_count == 3
        assert list(h.active_nodes()) == [0, 2, 3]
        assert not h.is_active(1)


class TestPartition:
    def test_members_consistent(self):
        p = Partition([0, 1, 0, 2])
        assert p.members[0] == (0, 2)
        assert p.members[1] == (1,)
        assert p.community(3) == 2

    def test_from_pairs_roundtrip(self):
        p = Partition.from_pairs([(0, 5), (2, 5), (1, 9)])
        assert p.community_of == (5, 9, 5)

    def test_from_pairs_missing_node(self):
        with pytest.raises(PartitionCoverageError):
            Partition.from_pairs([(0, 1), (2, 1)])

    def test_from_pairs_duplicate_node(self):
        with pytest.raises(PartitionCoverageError):
            Partition.from_pairs([(0, 1), (0, 2)])
