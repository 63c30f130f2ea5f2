"""Benchmark networks with planted community structure (LFR family).

The generator runs in three steps: draw a power-law degree sequence and wire
it with the configuration model, draw power-law community sizes and assign
nodes under the size >= internal-degree constraint, then rewire links with
degree-preserving double-edge swaps until the inter-community link fraction
sits within tolerance of the requested mixing value.

All randomness flows through numpy Generators derived from ``params.seed``,
so identical parameters produce identical networks.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, replace

import numpy as np

from ._util import round_half_up
from .errors import ConfigurationError, GenerationFailure
from .graph import Graph, Partition, inter_community_fraction
from .seeding import derive_seed

RETRY_BUDGET = 5


@dataclass(frozen=True)
class LfrParams:
    """Generator configuration.

    ``mixing_tolerance`` and ``max_rewire_sweeps`` control the rewiring stage;
    the defaults converge reliably for benchmark-scale configurations.
    """

    n: int
    avg_degree: float
    max_degree: int
    mu: float
    gamma: float
    beta: float
    c_min: int
    c_max: int
    mixing_tolerance: float = 0.02
    max_rewire_sweeps: int = 100
    seed: int = 0

    def validate(self) -> None:
        if self.n <= 0:
            raise ConfigurationError("n must be positive")
        if not 0.0 < self.mu < 1.0:
            raise ConfigurationError("mu must lie strictly between 0 and 1")
        if not (1 <= self.c_min <= self.c_max <= self.n):
            raise ConfigurationError("need 1 <= c_min <= c_max <= n")
        if not 1 <= self.avg_degree <= self.max_degree:
            raise ConfigurationError("need 1 <= avg_degree <= max_degree")
        if self.max_degree >= self.n:
            raise ConfigurationError("max_degree must be below n")
        if self.gamma <= 1.0 or self.beta <= 1.0:
            raise ConfigurationError("power-law exponents must exceed 1")
        if self.mixing_tolerance <= 0.0:
            raise ConfigurationError("mixing_tolerance must be positive")
        if self.max_rewire_sweeps <= 0:
            raise ConfigurationError("max_rewire_sweeps must be positive")


class TruncatedPowerLaw:
    """Integer power-law sampler: floor of a continuous truncated Pareto.

    Mass of integer k is the integral of x^-exponent over [k, k+1) clipped to
    [lower, upper + 1), so the lower cutoff may be fractional; that is the
    knob used to hit a requested mean exactly.
    """

    def __init__(self, exponent: float, lower: float, upper: int):
        if exponent <= 1.0:
            raise ConfigurationError("exponent must exceed 1")
        if not 1.0 <= lower <= upper:
            raise ConfigurationError("need 1 <= lower <= upper")
        self.exponent = exponent
        self.lower = lower
        self.upper = int(upper)
        e = 1.0 - exponent
        self._a_pow = lower**e
        self._b_pow = (upper + 1.0) ** e
        self._e = e

    def _cdf(self, x):
        return (self._a_pow - np.asarray(x, dtype=np.float64) ** self._e) / (
            self._a_pow - self._b_pow
        )

    def support(self) -> np.ndarray:
        return np.arange(int(np.floor(self.lower)), self.upper + 1)

    def pmf(self) -> np.ndarray:
        ks = self.support().astype(np.float64)
        left = np.maximum(ks, self.lower)
        right = np.minimum(ks + 1.0, self.upper + 1.0)
        return self._cdf(right) - self._cdf(left)

    def mean(self) -> float:
        return float(np.dot(self.support(), self.pmf()))

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        u = rng.random(size)
        x = (self._a_pow - u * (self._a_pow - self._b_pow)) ** (1.0 / self._e)
        k = np.floor(x).astype(np.int64)
        return np.clip(k, int(np.floor(self.lower)), self.upper)


def solve_degree_cutoff(params: LfrParams) -> TruncatedPowerLaw:
    """Find the lower cutoff so the truncated distribution's mean equals
    ``avg_degree``; bisection on a monotone function of the cutoff."""
    lo, hi = 1.0, float(params.max_degree)
    law_lo = TruncatedPowerLaw(params.gamma, lo, params.max_degree)
    if params.avg_degree < law_lo.mean() - 1e-9:
        raise ConfigurationError(
            f"avg_degree {params.avg_degree} below attainable minimum "
            f"{law_lo.mean():.3f} for gamma={params.gamma}, max={params.max_degree}"
        )
    if params.avg_degree > params.max_degree:
        raise ConfigurationError("avg_degree above max_degree")
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if TruncatedPowerLaw(params.gamma, mid, params.max_degree).mean() < params.avg_degree:
            lo = mid
        else:
            hi = mid
    return TruncatedPowerLaw(params.gamma, 0.5 * (lo + hi), params.max_degree)


def sample_degrees(params: LfrParams, rng: np.random.Generator) -> np.ndarray:
    """Degree sequence: power law with exponent gamma, capped at max_degree,
    sample mean within 5% of avg_degree, even sum."""
    params.validate()
    law = solve_degree_cutoff(params)
    tolerance = 0.05 * params.avg_degree
    degrees = None
    for _ in range(10):
        candidate = law.sample(rng, params.n)
        if abs(candidate.mean() - params.avg_degree) <= tolerance:
            degrees = candidate
            break
    if degrees is None:
        raise GenerationFailure(
            f"sample mean stayed outside 5% of avg_degree={params.avg_degree}"
        )
    if int(degrees.sum()) % 2 == 1:
        bump = int(np.flatnonzero(degrees < params.max_degree)[0])
        degrees[bump] += 1
    return degrees


def sample_community_sizes(params: LfrParams, rng: np.random.Generator) -> np.ndarray:
    """Community sizes: power law with exponent beta in [c_min, c_max],
    summing exactly to n."""
    params.validate()
    law = TruncatedPowerLaw(params.beta, float(params.c_min), params.c_max)
    sizes: list[int] = []
    total = 0
    while total < params.n:
        s = int(law.sample(rng, 1)[0])
        sizes.append(s)
        total += s
    if total > params.n:
        excess = total - params.n
        if sizes[-1] - excess >= params.c_min:
            sizes[-1] -= excess
        else:
            total -= sizes.pop()
            deficit = params.n - total
            # smaller than c_min, so fold it into existing communities
            while deficit > 0:
                progressed = False
                for i in range(len(sizes)):
                    if sizes[i] < params.c_max:
                        sizes[i] += 1
                        deficit -= 1
                        progressed = True
                        if deficit == 0:
                            break
                if not progressed:
                    raise GenerationFailure(
                        "cannot absorb the size remainder within [c_min, c_max]"
                    )
    return np.asarray(sizes, dtype=np.int64)


def internal_degrees(degrees: np.ndarray, mu: float) -> np.ndarray:
    """Requested same-community degree per node: round((1-mu) * k)."""
    return np.array([round_half_up((1.0 - mu) * int(k)) for k in degrees], dtype=np.int64)


def assign_communities(
    degrees: np.ndarray, sizes: np.ndarray, mu: float, rng: np.random.Generator
) -> Partition:
    """Place each node in a community of size >= its internal degree.

    Iterated random placement: nodes are processed by decreasing internal
    degree; a full community displaces a random member, which re-enters the
    queue. Bounded total work, then :class:`GenerationFailure`.
    """
    degrees = np.asarray(degrees, dtype=np.int64)
    sizes = np.asarray(sizes, dtype=np.int64)
    n = degrees.size
    if int(sizes.sum()) != n:
        raise ConfigurationError("community sizes must sum to the node count")
    d_int = internal_degrees(degrees, mu)
    if d_int.max(initial=0) > int(sizes.max()):
        raise GenerationFailure(
            f"internal degree {int(d_int.max())} exceeds the largest community "
            f"size {int(sizes.max())}"
        )
    order_by_size = np.argsort(-sizes, kind="stable")
    sorted_sizes = sizes[order_by_size]
    # communities with size >= d form a prefix of the size-sorted order
    feasible_count = np.searchsorted(-sorted_sizes, -d_int, side="right")

    rosters: list[list[int]] = [[] for _ in range(sizes.size)]
    assignment = np.full(n, -1, dtype=np.int64)
    queue = deque(int(i) for i in np.argsort(-d_int, kind="stable"))
    budget = 200 * n + 1000
    while queue:
        budget -= 1
        if budget < 0:
            raise GenerationFailure("community assignment did not settle")
        node = queue.popleft()
        options = int(feasible_count[node])
        if options == 0:
            raise GenerationFailure(
                f"no community large enough for internal degree {int(d_int[node])}"
            )
        slot = int(rng.integers(options))
        roster = rosters[slot]
        if len(roster) < int(sorted_sizes[slot]):
            roster.append(node)
        else:
            victim_idx = int(rng.integers(len(roster)))
            evicted = roster[victim_idx]
            roster[victim_idx] = node
            assignment[evicted] = -1
            queue.append(evicted)
        assignment[node] = int(order_by_size[slot])
    return Partition(assignment)


def _erdos_gallai_ok(degrees: np.ndarray) -> bool:
    d = np.sort(np.asarray(degrees, dtype=np.int64))[::-1]
    n = d.size
    if n == 0:
        return True
    if int(d.sum()) % 2 == 1:
        return False
    if d[0] >= n:
        return False
    cum = np.cumsum(d)
    for k in range(1, n + 1):
        if d[k - 1] < k:
            break
        rhs = k * (k - 1) + int(np.minimum(d[k:], k).sum())
        if int(cum[k - 1]) > rhs:
            return False
    return True


def wire_configuration_model(degrees: np.ndarray, rng: np.random.Generator) -> Graph:
    """Realize a degree sequence as a simple graph: stub matching plus a
    repair pass that swaps away self-loops and multi-edges."""
    degrees = np.asarray(degrees, dtype=np.int64)
    if int(degrees.sum()) % 2 == 1:
        raise ConfigurationError("degree sum must be even")
    if not _erdos_gallai_ok(degrees):
        raise ConfigurationError("degree sequence is not realizable as a simple graph")
    n = degrees.size
    stubs = np.repeat(np.arange(n, dtype=np.int64), degrees)
    rng.shuffle(stubs)
    pairs = stubs.reshape(-1, 2)

    edge_keys: set[int] = set()
    accepted: list[tuple[int, int]] = []
    bad: list[tuple[int, int]] = []
    for u, v in pairs:
        u, v = int(u), int(v)
        if u > v:
            u, v = v, u
        key = u * n + v
        if u == v or key in edge_keys:
            bad.append((u, v))
        else:
            edge_keys.add(key)
            accepted.append((u, v))

    tries = 200 * (len(bad) + 10)
    while bad:
        tries -= 1
        if tries < 0:
            raise GenerationFailure("could not repair stub matching into a simple graph")
        a, b = bad.pop()
        placed = False
        for _ in range(50):
            j = int(rng.integers(len(accepted)))
            c, d = accepted[j]
            if int(rng.integers(2)):
                c, d = d, c
            e1 = (a, c) if a < c else (c, a)
            e2 = (b, d) if b < d else (d, b)
            k1 = e1[0] * n + e1[1]
            k2 = e2[0] * n + e2[1]
            if a == c or b == d or k1 == k2 or k1 in edge_keys or k2 in edge_keys:
                continue
            edge_keys.discard(min(c, d) * n + max(c, d))
            accepted[j] = e1
            accepted.append(e2)
            edge_keys.add(k1)
            edge_keys.add(k2)
            placed = True
            break
        if not placed:
            bad.insert(0, (a, b))

    adjacency: list[set] = [set() for _ in range(n)]
    for u, v in accepted:
        adjacency[u].add(v)
        adjacency[v].add(u)
    realized = np.array([len(s) for s in adjacency], dtype=np.int64)
    if not np.array_equal(realized, degrees):
        raise GenerationFailure("repair pass broke the degree sequence")
    return Graph.from_adjacency_sets(adjacency)


class _RewireState:
    """Mutable adjacency plus the bookkeeping the swap moves maintain."""

    def __init__(self, g: Graph, p: Partition, mu: float):
        self.n = g.node_count
        self.adj: list[set] = [set(g.neighbors(i)) for i in range(self.n)]
        self.labels = p.labels_array()
        self.m = g.edge_count
        sizes = p.sizes()
        deg = g.degrees_array()
        want = internal_degrees(deg, mu)
        cap = np.array([sizes[int(c)] - 1 for c in self.labels], dtype=np.int64)
        self.target = np.minimum(want, cap)
        indptr, indices = g.csr()
        src = np.repeat(np.arange(self.n), np.diff(indptr))
        same = self.labels[src] == self.labels[indices]
        self.k_in = np.bincount(src[same], minlength=self.n).astype(np.int64)
        self.inter = int(g.edge_count - same.sum() // 2)
        self.members: dict[int, list[int]] = {
            int(c): [int(v) for v in nodes] for c, nodes in p.members.items()
        }

    def fraction(self) -> float:
        return self.inter / self.m

    def external_neighbors(self, u: int) -> list[int]:
        cu = self.labels[u]
        return [w for w in sorted(self.adj[u]) if self.labels[w] != cu]

    def internal_neighbors(self, u: int) -> list[int]:
        cu = self.labels[u]
        return [w for w in sorted(self.adj[u]) if self.labels[w] == cu]

    def _connect(self, a: int, b: int) -> None:
        self.adj[a].add(b)
        self.adj[b].add(a)
        if self.labels[a] == self.labels[b]:
            self.k_in[a] += 1
            self.k_in[b] += 1
        else:
            self.inter += 1

    def _disconnect(self, a: int, b: int) -> None:
        self.adj[a].discard(b)
        self.adj[b].discard(a)
        if self.labels[a] == self.labels[b]:
            self.k_in[a] -= 1
            self.k_in[b] -= 1
        else:
            self.inter -= 1

    def swap_to_intra(self, u: int, x: int, v: int, y: int) -> None:
        """(u,v),(x,y) -> (u,x),(v,y) with u,x in one community."""
        self._disconnect(u, v)
        self._disconnect(x, y)
        self._connect(u, x)
        self._connect(v, y)

    def swap_to_inter(self, u: int, x: int, v: int, y: int) -> None:
        """(u,x),(v,y) -> (u,v),(x,y) across two communities."""
        self._disconnect(u, x)
        self._disconnect(v, y)
        self._connect(u, v)
        self._connect(x, y)


def _try_gain_intra(state: _RewireState, u: int, rng: np.random.Generator) -> bool:
    """One degree-preserving swap that turns two external links into one
    internal link at u (and x) plus one link elsewhere."""
    cu = int(state.labels[u])
    community = state.members[cu]
    if len(community) < 2:
        return False
    ext_u = state.external_neighbors(u)
    if not ext_u:
        return False
    deficit = [
        x
        for x in community
        if x != u and state.k_in[x] < state.target[x] and x not in state.adj[u]
    ]
    anyone: list[int] | None = None
    for attempt in range(12):
        if attempt < 6 and deficit:
            pool = deficit
        else:
            if anyone is None:
                anyone = [x for x in community if x != u and x not in state.adj[u]]
            pool = anyone
            if not pool:
                return False
        x = pool[int(rng.integers(len(pool)))]
        ext_x = state.external_neighbors(x)
        if not ext_x:
            continue
        v = ext_u[int(rng.integers(len(ext_u)))]
        candidates = [y for y in ext_x if y != v and y != u and y not in state.adj[v]]
        if not candidates:
            continue
        y = candidates[int(rng.integers(len(candidates)))]
        state.swap_to_intra(u, x, v, y)
        return True
    return False


def _try_gain_inter(state: _RewireState, rng: np.random.Generator) -> bool:
    """One swap replacing two internal links (in different communities) with
    two external links; prefers nodes above their internal-degree target."""
    over = np.flatnonzero(state.k_in > state.target)
    pool = over if over.size else np.flatnonzero(state.k_in > 0)
    if pool.size == 0:
        return False
    for _ in range(30):
        u = int(pool[int(rng.integers(pool.size))])
        int_u = state.internal_neighbors(u)
        if not int_u:
            continue
        x = int_u[int(rng.integers(len(int_u)))]
        v = int(pool[int(rng.integers(pool.size))])
        if state.labels[v] == state.labels[u]:
            continue
        int_v = state.internal_neighbors(v)
        if not int_v:
            continue
        y = int_v[int(rng.integers(len(int_v)))]
        if v in state.adj[u] or y in state.adj[x] or u == v or x == y or x == v or y == u:
            continue
        state.swap_to_inter(u, x, v, y)
        return True
    return False


def rewire_to_mixing(
    g: Graph,
    p: Partition,
    mu: float,
    params: LfrParams,
    rng: np.random.Generator,
    _sweep_hook=None,
) -> Graph:
    """Degree-preserving rewiring until the inter-community link fraction is
    within ``params.mixing_tolerance`` of ``mu``.

    First drives each node toward its internal-degree target (which lands the
    global fraction near mu), then fine-tunes the global fraction with swaps
    in whichever direction is still needed. ``_sweep_hook(adj, k_in, inter)``
    is invoked after every sweep, for invariant-checking instrumentation.
    """
    p.check_covers(g)
    state = _RewireState(g, p, mu)
    band = 0.5 * params.mixing_tolerance

    for _ in range(params.max_rewire_sweeps):
        deficits = np.flatnonzero(state.k_in < state.target)
        if deficits.size == 0:
            break
        progress = 0
        for u in rng.permutation(deficits):
            u = int(u)
            if state.k_in[u] >= state.target[u]:
                continue
            if _try_gain_intra(state, u, rng):
                progress += 1
        if _sweep_hook is not None:
            _sweep_hook(state.adj, state.k_in.copy(), state.inter)
        if progress == 0:
            break

    fine_budget = max(10_000, 50 * state.m)
    while abs(state.fraction() - mu) > band and fine_budget > 0:
        fine_budget -= 1
        if state.fraction() > mu:
            moved = False
            order = rng.permutation(np.flatnonzero(state.k_in < state.target))
            for u in order[:32]:
                if _try_gain_intra(state, int(u), rng):
                    moved = True
                    break
            if not moved:
                # nobody is below target any more; relax to any node with an
                # external link and room inside its community
                candidates = np.flatnonzero(state.k_in - state.target < 2)
                if candidates.size == 0:
                    break
                u = int(candidates[int(rng.integers(candidates.size))])
                if not _try_gain_intra(state, u, rng):
                    continue
        else:
            if not _try_gain_inter(state, rng):
                break
        if _sweep_hook is not None and fine_budget % 1000 == 0:
            _sweep_hook(state.adj, state.k_in.copy(), state.inter)

    result = Graph.from_adjacency_sets(state.adj)
    if not np.array_equal(result.degrees_array(), g.degrees_array()):
        raise GenerationFailure("rewiring broke the degree sequence")
    achieved = state.fraction()
    if abs(achieved - mu) > params.mixing_tolerance:
        raise GenerationFailure(
            f"mixing fraction {achieved:.4f} did not reach {mu} "
            f"+/- {params.mixing_tolerance}"
        )
    return result


def generate(params: LfrParams) -> tuple[Graph, Partition]:
    """Full pipeline with a retry budget; each retry reseeds every stage."""
    params.validate()
    failure: GenerationFailure | None = None
    for attempt in range(RETRY_BUDGET):
        root = np.random.default_rng(derive_seed(params.seed, "lfr-generate", attempt))
        r_deg, r_sizes, r_assign, r_wire, r_mix = root.spawn(5)
        try:
            degrees = sample_degrees(params, r_deg)
            sizes = sample_community_sizes(params, r_sizes)
            partition = assign_communities(degrees, sizes, params.mu, r_assign)
            wired = wire_configuration_model(degrees, r_wire)
            graph = rewire_to_mixing(wired, partition, params.mu, params, r_mix)
            return graph, partition
        except GenerationFailure as exc:
            failure = exc
    raise GenerationFailure(
        f"generation failed after {RETRY_BUDGET} attempts (seed={params.seed}): {failure}"
    )


def generation_metadata(params: LfrParams, g: Graph, p: Partition) -> dict:
    """Sidecar record: every parameter plus the achieved mixing fraction."""
    meta = {
        "n": params.n,
        "avg_degree": params.avg_degree,
        "max_degree": params.max_degree,
        "mu": params.mu,
        "gamma": params.gamma,
        "beta": params.beta,
        "c_min": params.c_min,
        "c_max": params.c_max,
        "mixing_tolerance": params.mixing_tolerance,
        "max_rewire_sweeps": params.max_rewire_sweeps,
        "seed": params.seed,
        "edge_count": g.edge_count,
        "community_count": len(p.members),
        "achieved_mixing": inter_community_fraction(g, p),
    }
    return meta


def params_with(params: LfrParams, **overrides) -> LfrParams:
    return replace(params, **overrides)
