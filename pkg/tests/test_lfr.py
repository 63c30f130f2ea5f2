import numpy as np
import pytest

from episim.errors import ConfigurationError, GenerationFailure
from episim.graph import inter_community_fraction, split_degree
from episim.lfr import (
    LfrParams,
    TruncatedPowerLaw,
    assign_communities,
    generate,
    internal_degrees,
    rewire_to_mixing,
    sample_community_sizes,
    sample_degrees,
    solve_degree_cutoff,
    wire_configuration_model,
)

from conftest import SMALL_LFR

TABLE_LIKE = LfrParams(
    n=2000,
    avg_degree=10,
    max_degree=180,
    mu=0.3,
    gamma=3.0,
    beta=2.0,
    c_min=5,
    c_max=180,
    seed=77,
)


def quadrature_pmf(exponent: float, lower: float, upper: int) -> dict[int, float]:
    """Reference mass per integer: literal numeric integration of x^-exponent
    over [k, k+1) clipped to [lower, upper+1), independent of the sampler's
    closed-form inverse CDF."""
    grid_per_unit = 4000
    masses = {}
    for k in range(int(np.floor(lower)), upper + 1):
        a, b = max(float(k), lower), min(float(k + 1), upper + 1.0)
        xs = np.linspace(a, b, grid_per_unit)
        masses[k] = float(np.trapezoid(xs**-exponent, xs))
    total = sum(masses.values())
    return {k: m / total for k, m in masses.items()}


class TestPowerLawSampler:
    def test_pmf_matches_quadrature(self):
        law = TruncatedPowerLaw(3.0, 5.3, 60)
        reference = quadrature_pmf(3.0, 5.3, 60)
        pmf = law.pmf()
        for k, mass in zip(law.support(), pmf):
            assert mass == pytest.approx(reference[int(k)], abs=1e-6)

    def test_degree_tail_mass_three_sigma(self):
        law = solve_degree_cutoff(TABLE_LIKE)
        reference = quadrature_pmf(3.0, law.lower, 180)
        expected = sum(mass for k, mass in reference.items() if k >= 40)
        draws = 100_000
        rng = np.random.default_rng(31337)
        sample = law.sample(rng, draws)
        observed = int(np.count_nonzero(sample >= 40))
        sigma = np.sqrt(draws * expected * (1 - expected))
        assert abs(observed - draws * expected) <= 3 * sigma

    def test_community_size_histogram_three_sigma(self):
        law = TruncatedPowerLaw(2.0, 5.0, 180)
        reference = quadrature_pmf(2.0, 5.0, 180)
        draws = 10_000
        rng = np.random.default_rng(4242)
        sample = law.sample(rng, draws)
        for lo, hi in ((5, 10), (10, 20), (20, 50), (50, 181)):
            expected = sum(mass for k, mass in reference.items() if lo <= k < hi)
            observed = int(np.count_nonzero((sample >= lo) & (sample < hi)))
            sigma = np.sqrt(draws * expected * (1 - expected))
            assert abs(observed - draws * expected) <= 3 * sigma, (lo, hi)


class TestSampleDegrees:
    def test_bounds_mean_and_even_sum(self):
        rng = np.random.default_rng(1)
        degrees = sample_degrees(TABLE_LIKE, rng)
        assert degrees.min() >= 1
        assert degrees.max() <= 180
        assert int(degrees.sum()) % 2 == 0
        assert abs(degrees.mean() - 10) <= 0.5

    def test_infeasible_mean_rejected(self):
        params = LfrParams(
            n=100, avg_degree=1.01, max_degree=180, mu=0.3,
            gamma=3.0, beta=2.0, c_min=5, c_max=100, seed=0,
        )
        with pytest.raises(ConfigurationError):
            sample_degrees(params, np.random.default_rng(0))


class TestSampleCommunitySizes:
    def test_bounds_and_exact_sum(self):
        rng = np.random.default_rng(2)
        sizes = sample_community_sizes(TABLE_LIKE, rng)
        assert sizes.min() >= 5
        assert sizes.max() <= 180
        assert int(sizes.sum()) == TABLE_LIKE.n

    def test_degenerate_bounds_divide_evenly(self):
        params = LfrParams(
            n=100, avg_degree=4, max_degree=20, mu=0.3,
            gamma=3.0, beta=2.0, c_min=10, c_max=10, seed=0,
        )
        sizes = sample_community_sizes(params, np.random.default_rng(3))
        assert list(sizes) == [10] * 10

    def test_c_min_larger_than_n_rejected(self):
        with pytest.raises(ConfigurationError):
            LfrParams(
                n=10, avg_degree=2, max_degree=5, mu=0.3,
                gamma=3.0, beta=2.0, c_min=50, c_max=60, seed=0,
            ).validate()


class TestAssignCommunities:
    def test_constraint_holds_exhaustively(self):
        rng = np.random.default_rng(4)
        degrees = np.array([3, 5, 2, 8, 1, 6, 4, 2, 7, 3] * 3)
        sizes = np.array([12, 10, 8])
        p = assign_communities(degrees, sizes, 0.3, rng)
        want = internal_degrees(degrees, 0.3)
        roster_sizes = {c: len(m) for c, m in p.members.items()}
        assert sorted(roster_sizes.values()) == sorted(sizes.tolist())
        for node in range(degrees.size):
            assert roster_sizes[p.community(node)] >= want[node]

    def test_high_internal_degree_never_in_small_community(self):
        rng = np.random.default_rng(5)
        degrees = np.array([10] + [2] * 19)
        sizes = np.array([5, 15])
        for _ in range(20):
            p = assign_communities(degrees, sizes, 0.0001, rng)
            # node 0 wants ~10 internal links; only the size-15 community fits
            assert len(p.members[p.community(0)]) == 15

    def test_mu_near_one_every_placement_valid(self):
        rng = np.random.default_rng(6)
        degrees = np.array([9, 9, 9, 9, 9, 9, 1, 1, 1, 1])
        sizes = np.array([5, 5])
        p = assign_communities(degrees, sizes, 0.999, rng)
        assert sorted(len(m) for m in p.members.values()) == [5, 5]

    def test_infeasible_raises_generation_failure(self):
        rng = np.random.default_rng(7)
        degrees = np.array([40] * 10)
        sizes = np.array([5, 5])
        with pytest.raises(GenerationFailure):
            assign_communities(degrees, sizes, 0.1, rng)


class TestConfigurationModel:
    def test_two_stubs_single_edge(self):
        g = wire_configuration_model(np.array([1, 1]), np.random.default_rng(0))
        assert list(g.iter_edges()) == [(0, 1)]

    def test_all_twos_triangle(self):
        g = wire_configuration_model(np.array([2, 2, 2]), np.random.default_rng(1))
        assert sorted(g.iter_edges()) == [(0, 1), (0, 2), (1, 2)]

    def test_odd_sum_rejected(self):
        with pytest.raises(ConfigurationError):
            wire_configuration_model(np.array([1, 1, 1]), np.random.default_rng(2))

    def test_unrealizable_sequence_rejected(self):
        with pytest.raises(ConfigurationError):
            wire_configuration_model(np.array([3, 1]), np.random.default_rng(3))

    def test_realized_degrees_match_requested(self):
        rng = np.random.default_rng(8)
        for trial in range(10):
            params = LfrParams(
                n=300, avg_degree=6, max_degree=40, mu=0.3,
                gamma=2.5, beta=2.0, c_min=5, c_max=40, seed=trial,
            )
            degrees = sample_degrees(params, rng)
            g = wire_configuration_model(degrees, rng)
            recount = np.array([g.degree(i) for i in range(300)])
            assert np.array_equal(recount, degrees)
            for u, v in g.iter_edges():
                assert u != v


class TestRewireToMixing:
    def test_degrees_preserved_and_simple_every_sweep(self):
        params = LfrParams(
            n=60, avg_degree=6, max_degree=20, mu=0.3,
            gamma=3.0, beta=2.0, c_min=5, c_max=20, seed=12,
        )
        rng = np.random.default_rng(12)
        degrees = sample_degrees(params, rng)
        sizes = sample_community_sizes(params, rng)
        p = assign_communities(degrees, sizes, params.mu, rng)
        g0 = wire_configuration_model(degrees, rng)

        seen = []

        def hook(adj, k_in, inter):
            for u, nbrs in enumerate(adj):
                assert u not in nbrs, "self-loop introduced"
                for v in nbrs:
                    assert u in adj[v], "symmetry broken"
            assert [len(nbrs) for nbrs in adj] == [int(d) for d in degrees]
            seen.append(inter)

        g = rewire_to_mixing(g0, p, params.mu, params, rng, _sweep_hook=hook)
        assert seen, "hook never ran"
        assert np.array_equal(g.degrees_array(), g0.degrees_array())
        assert abs(inter_community_fraction(g, p) - params.mu) <= params.mixing_tolerance

    def test_unreachable_tolerance_fails(self):
        params = LfrParams(
            n=60, avg_degree=6, max_degree=20, mu=0.3,
            gamma=3.0, beta=2.0, c_min=5, c_max=20, seed=12,
            mixing_tolerance=1e-9, max_rewire_sweeps=1,
        )
        rng = np.random.default_rng(12)
        degrees = sample_degrees(params, rng)
        sizes = sample_community_sizes(params, rng)
        p = assign_communities(degrees, sizes, params.mu, rng)
        g0 = wire_configuration_model(degrees, rng)
        with pytest.raises(GenerationFailure):
            rewire_to_mixing(g0, p, params.mu, params, rng)


class TestGenerate:
    def test_small_benchmark_properties(self, small_lfr):
        g, p = small_lfr
        params = SMALL_LFR
        assert g.node_count == params.n
        sizes = [len(m) for m in p.members.values()]
        assert min(sizes) >= params.c_min
        assert max(sizes) <= params.c_max
        assert sum(sizes) == params.n
        mean_degree = 2 * g.edge_count / g.node_count
        assert abs(mean_degree - params.avg_degree) <= 0.05 * params.avg_degree
        assert max(g.degree(i) for i in range(g.node_count)) <= params.max_degree
        achieved = inter_community_fraction(g, p)
        assert abs(achieved - params.mu) <= params.mixing_tolerance

    def test_split_degree_identity_on_generated_graph(self, small_lfr):
        g, p = small_lfr
        for i in range(g.node_count):
            ks = split_degree(g, p, i)
            assert ks.k_in + ks.k_out == g.degree(i)

    def test_deterministic_given_seed(self):
        params = LfrParams(
            n=200, avg_degree=6, max_degree=30, mu=0.4,
            gamma=3.0, beta=2.0, c_min=5, c_max=30, seed=9,
        )
        g1, p1 = generate(params)
        g2, p2 = generate(params)
        assert g1 == g2
        assert p1 == p2

    def test_different_seeds_differ(self):
        base = dict(
            n=200, avg_degree=6, max_degree=30, mu=0.4,
            gamma=3.0, beta=2.0, c_min=5, c_max=30,
        )
        g1, _ = generate(LfrParams(seed=1, **base))
        g2, _ = generate(LfrParams(seed=2, **base))
        assert g1 != g2

    def test_invalid_mu_rejected(self):
        with pytest.raises(ConfigurationError):
            generate(
                LfrParams(
                    n=50, avg_degree=4, max_degree=10, mu=1.5,
                    gamma=3.0, beta=2.0, c_min=5, c_max=10, seed=0,
                )
            )
