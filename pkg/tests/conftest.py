from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

from episim.graph import Graph, Partition, build_from_edges
from episim.lfr import LfrParams, generate


def random_simple_graph(rng: np.random.Generator, n: int, extra_edges: int) -> Graph:
    """Connected-ish random simple graph for oracle tests."""
    edges = set()
    for _ in range(extra_edges):
        u, v = (int(x) for x in rng.integers(n, size=2))
        if u != v:
            edges.add((min(u, v), max(u, v)))
    return build_from_edges(sorted(edges), node_count=n)


def bfs_paths(g: Graph, source: int):
    """Distances and shortest-path counts from one source (oracle side)."""
    dist = {source: 0}
    sigma = {source: 1}
    frontier = [source]
    while frontier:
        nxt = []
        for v in frontier:
            for w in g.neighbors(v):
                if w not in dist:
                    dist[w] = dist[v] + 1
                    sigma[w] = 0
                    nxt.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
        frontier = nxt
    return dist, sigma


def brute_force_betweenness(g: Graph) -> dict[int, float]:
    """Exhaustive pair-by-pair path counting, exact rational arithmetic.

    Independent of the implementation under test: no dependency
    accumulation, just sigma(s,v) * sigma(v,t) / sigma(s,t) summed over all
    unordered pairs for which v lies on a shortest path. Skips removed nodes.
    """
    nodes = [v for v in range(g.node_count) if g.is_active(v)]
    per_source = {s: bfs_paths(g, s) for s in nodes}
    totals = {v: Fraction(0) for v in nodes}
    for s, t in combinations(nodes, 2):
        dist_s, sigma_s = per_source[s]
        if t not in dist_s:
            continue
        d_st = dist_s[t]
        sigma_st = sigma_s[t]
        dist_t, sigma_t = per_source[t]
        for v in nodes:
            if v == s or v == t or v not in dist_s or v not in dist_t:
                continue
            if dist_s[v] + dist_t[v] == d_st:
                totals[v] += Fraction(sigma_s[v] * sigma_t[v], sigma_st)
    return {v: float(x) for v, x in totals.items()}


SMALL_LFR = LfrParams(
    n=400,
    avg_degree=8,
    max_degree=40,
    mu=0.3,
    gamma=3.0,
    beta=2.0,
    c_min=5,
    c_max=40,
    seed=1234,
)


@pytest.fixture(scope="session")
def small_lfr() -> tuple[Graph, Partition]:
    return generate(SMALL_LFR)
