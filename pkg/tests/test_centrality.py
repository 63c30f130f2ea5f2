from itertools import combinations

import numpy as np
import pytest

from episim.centrality import (
    ScoreKind,
    betweenness,
    community_scores,
    degree_scores,
)
from episim.errors import ConfigurationError, PartitionCoverageError
from episim.graph import Partition, build_from_edges, degree, remove_nodes

from conftest import bfs_paths, brute_force_betweenness, random_simple_graph


class TestBetweenness:
    def test_path_graph(self):
        g = build_from_edges([(0, 1), (1, 2)])
        table = betweenness(g)
        assert table.values == {0: 0.0, 1: 1.0, 2: 0.0}

    def test_star_center(self):
        g = build_from_edges([(0, i) for i in range(1, 5)])
        assert betweenness(g).values[0] == 6.0

    def test_matches_brute_force_exactly_on_random_graphs(self):
        rng = np.random.default_rng(2024)
        for _ in range(25):
            n = int(rng.integers(4, 40))
            g = random_simple_graph(rng, n, int(rng.integers(n, 3 * n)))
            mine = betweenness(g).values
            oracle = brute_force_betweenness(g)
            assert mine == oracle

    def test_tree_equals_pair_counting(self):
        # spanning-tree edges only: every connected pair has exactly one path
        rng = np.random.default_rng(5)
        n = 60
        edges = [(int(rng.integers(i)), i) for i in range(1, n)]
        g = build_from_edges(edges)
        table = betweenness(g).values
        oracle = {v: 0.0 for v in range(n)}
        per_source = {s: bfs_paths(g, s) for s in range(n)}
        for s, t in combinations(range(n), 2):
            dist_s, _ = per_source[s]
            for v in range(n):
                if v != s and v != t and per_source[s][0][v] + per_source[t][0][v] == dist_s[t]:
                    oracle[v] += 1.0
        assert table == oracle

    def test_total_betweenness_equals_interior_node_count(self):
        # every shortest path has dist-1 interior nodes, so summing scores
        # over all nodes must equal the sum of (dist - 1) over connected pairs
        rng = np.random.default_rng(33)
        for _ in range(10):
            n = int(rng.integers(5, 35))
            g = random_simple_graph(rng, n, 2 * n)
            total = sum(betweenness(g).values.values())
            expected = 0
            for s in range(n):
                dist, _ = bfs_paths(g, s)
                expected += sum(d - 1 for t, d in dist.items() if t > s and d >= 1)
            assert total == pytest.approx(expected, rel=1e-12)

    def test_disconnected_pairs_contribute_zero(self):
        g = build_from_edges([(0, 1), (1, 2), (3, 4)], node_count=5)
        table = betweenness(g).values
        assert table[1] == 1.0
        assert table[3] == 0.0 and table[4] == 0.0

    def test_removed_nodes_excluded(self):
        g = build_from_edges([(0, 1), (1, 2), (2, 3)])
        h = remove_nodes(g, {3})
        table = betweenness(h)
        assert set(table.values) == {0, 1, 2}
        assert table.values[1] == 1.0

    def test_ranked_breaks_ties_by_id(self):
        g = build_from_edges([(0, 1), (1, 2), (2, 3), (3, 0)])
        table = betweenness(g)
        assert table.ranked() == [0, 1, 2, 3]


class TestDegreeScores:
    def test_path(self):
        g = build_from_edges([(0, 1), (1, 2)])
        assert degree_scores(g).values == {0: 1, 1: 2, 2: 1}

    def test_edgeless(self):
        g = build_from_edges([], node_count=3)
        assert degree_scores(g).values == {0: 0, 1: 0, 2: 0}

    def test_equals_split_sum_under_any_partition(self, small_lfr):
        g, p = small_lfr
        degs = degree_scores(g).values
        k_in = community_scores(g, p, ScoreKind.IN_DEGREE).values
        k_out = community_scores(g, p, ScoreKind.OUT_DEGREE).values
        for i in range(g.node_count):
            assert degs[i] == k_in[i] + k_out[i] == degree(g, i)


class TestCommunityScores:
    def test_triangle_inout(self):
        g = build_from_edges([(0, 1), (1, 2), (0, 2)])
        table = community_scores(g, Partition([0, 0, 0]), ScoreKind.IN_OUT_DIFF)
        assert table.values == {0: 2, 1: 2, 2: 2}

    def test_one_intra_three_inter_outin(self):
        edges = [(0, 1), (0, 2), (0, 3), (0, 4)]
        g = build_from_edges(edges)
        p = Partition([0, 0, 1, 1, 1])
        table = community_scores(g, p, ScoreKind.OUT_IN_DIFF)
        assert table.values[0] == 2

    def test_inout_is_negated_outin(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            n = int(rng.integers(4, 25))
            g = random_simple_graph(rng, n, 2 * n)
            p = Partition([int(c) for c in rng.integers(3, size=n)])
            iod = community_scores(g, p, ScoreKind.IN_OUT_DIFF).values
            oid = community_scores(g, p, ScoreKind.OUT_IN_DIFF).values
            assert all(iod[i] == -oid[i] for i in range(n))

    def test_rejects_non_community_kind(self):
        g = build_from_edges([(0, 1)])
        with pytest.raises(ConfigurationError):
            community_scores(g, Partition([0, 0]), ScoreKind.BETWEENNESS)

    def test_coverage_error(self):
        g = build_from_edges([(0, 1), (1, 2)])
        with pytest.raises(PartitionCoverageError):
            community_scores(g, Partition([0, 0]), ScoreKind.IN_DEGREE)
