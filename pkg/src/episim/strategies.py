"""Immunization planners: ordered node-removal lists.

Global planners rank the whole network and re-score the residual graph as
they remove nodes. Community planners use only community-level information:
per-community quotas proportional to community size, filled by the chosen
community score, computed once on the intact graph (no recalculation; see
the docstrings). The community-bridge walk and the uniform baseline are the
stochastic planners; both are deterministic given their generator.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Mapping

import numpy as np

from ._util import round_half_up
from .centrality import ScoreKind, betweenness_array, community_scores
from .errors import CapacityError, ConfigurationError
from .graph import Graph, Partition


class StrategyKind(str, Enum):
    GLOBAL_DEGREE = "global_deg"
    GLOBAL_BETWEENNESS = "global_bet_cent"
    INDEG_NODES = "indeg_nodes"
    OUTDEG_NODES = "outdeg_nodes"
    INOUT_DIFF_NODES = "inout_diff_nodes"
    OUTIN_DIFF_NODES = "outin_diff_nodes"
    CBF = "cbf"
    RANDOM = "random"


GLOBAL_KINDS = (StrategyKind.GLOBAL_DEGREE, StrategyKind.GLOBAL_BETWEENNESS)

COMMUNITY_KINDS = (
    StrategyKind.INDEG_NODES,
    StrategyKind.OUTDEG_NODES,
    StrategyKind.INOUT_DIFF_NODES,
    StrategyKind.OUTIN_DIFF_NODES,
)

_COMMUNITY_SCORE_OF = {
    StrategyKind.INDEG_NODES: ScoreKind.IN_DEGREE,
    StrategyKind.OUTDEG_NODES: ScoreKind.OUT_DEGREE,
    StrategyKind.INOUT_DIFF_NODES: ScoreKind.IN_OUT_DIFF,
    StrategyKind.OUTIN_DIFF_NODES: ScoreKind.OUT_IN_DIFF,
}

STOCHASTIC_KINDS = (StrategyKind.CBF, StrategyKind.RANDOM)

CBF_WALK_CAP = 100


@dataclass(frozen=True)
class ImmunizationPlan:
    """Removal order produced by one strategy at one fraction."""

    order: tuple[int, ...]
    strategy: StrategyKind
    fraction: float

    def __post_init__(self):
        if len(set(self.order)) != len(self.order):
            raise ConfigurationError("plan contains a repeated node")

    def prefix(self, fraction: float, node_count: int) -> "ImmunizationPlan":
        """The plan this planner would have produced at a smaller fraction
        (planners select sequentially, so smaller quotas are prefixes)."""
        quota = round_half_up(fraction * node_count)
        if quota > len(self.order):
            raise CapacityError(f"prefix quota {quota} exceeds plan length {len(self.order)}")
        return ImmunizationPlan(self.order[:quota], self.strategy, fraction)


def _quota(fraction: float, node_count: int) -> int:
    if not 0.0 <= fraction <= 1.0:
        raise ConfigurationError(f"fraction {fraction} outside [0, 1]")
    return round_half_up(fraction * node_count)


def plan_global(
    g: Graph,
    kind: StrategyKind,
    fraction: float,
    *,
    recalc_interval: int = 1,
) -> ImmunizationPlan:
    """Global ranking with recalculation: repeatedly score the residual
    graph, remove the top node (ties to the lowest id), rescore.

    ``recalc_interval`` is the number of removals performed between rescores.
    The default 1 rescores after every single removal; the experiment harness
    raises it on benchmark-sized graphs where per-removal betweenness
    recalculation is computationally out of reach (see the sweep docs).
    """
    if kind not in GLOBAL_KINDS:
        raise ConfigurationError(f"{kind} is not a global strategy")
    if recalc_interval < 1:
        raise ConfigurationError("recalc_interval must be >= 1")
    quota = _quota(fraction, g.node_count)
    alive = np.ones(g.node_count, dtype=bool)
    if g.removed:
        alive[list(g.removed)] = False
    if quota > int(alive.sum()):
        raise CapacityError(f"quota {quota} exceeds {int(alive.sum())} active nodes")

    indptr, indices = g.csr()
    order: list[int] = []

    if kind is StrategyKind.GLOBAL_DEGREE:
        # residual degree after isolating a node is exactly the decremented
        # degree of its former neighbors, so recalculation is incremental
        scores = g.degrees_array().astype(np.int64)
        for _ in range(quota):
            masked = np.where(alive, scores, -1)
            pick = int(masked.argmax())
            order.append(pick)
            alive[pick] = False
            nbrs = indices[indptr[pick] : indptr[pick + 1]]
            live = nbrs[alive[nbrs]]
            scores[live] -= 1
        return ImmunizationPlan(tuple(order), kind, fraction)

    while len(order) < quota:
        scores = betweenness_array(g, alive)
        masked = np.where(alive, scores, -np.inf)
        take = min(recalc_interval, quota - len(order))
        for _ in range(take):
            pick = int(masked.argmax())
            order.append(pick)
            alive[pick] = False
            masked[pick] = -np.inf
    return ImmunizationPlan(tuple(order), kind, fraction)


def allocate_quota(p: Partition, fraction: float) -> dict[int, int]:
    """Per-community removal counts, proportional to community size.

    Floors first, then one extra each to the communities with the largest
    fractional remainders (ties by ascending community id) until the global
    quota round(fraction * n) is met.
    """
    total = _quota(fraction, p.node_count)
    sizes = p.sizes()
    quotas = {c: int(np.floor(fraction * size + 1e-9)) for c, size in sizes.items()}
    leftover = total - sum(quotas.values())
    if leftover > 0:
        remainders = sorted(
            sizes,
            key=lambda c: (-(fraction * sizes[c] - quotas[c]), c),
        )
        for c in remainders:
            if leftover == 0:
                break
            if quotas[c] < sizes[c]:
                quotas[c] += 1
                leftover -= 1
    if leftover != 0:
        raise ConfigurationError("quota allocation could not match the global quota")
    return quotas


def plan_community(
    g: Graph, p: Partition, kind: StrategyKind, fraction: float
) -> ImmunizationPlan:
    """Community-information strategy: within each community take the nodes
    with the highest community score, up to that community's quota.

    Scores are computed once on the intact graph; the community planners
    deliberately do not rescore after removals, matching their
    limited-information premise. The emitted order lists communities by
    descending size (ties by ascending community id); ordering within the
    plan only matters for prefixes, which sweeps never use.
    """
    if kind not in COMMUNITY_KINDS:
        raise ConfigurationError(f"{kind} is not a community strategy")
    p.check_covers(g)
    quotas = allocate_quota(p, fraction)
    table = community_scores(g, p, _COMMUNITY_SCORE_OF[kind])
    order: list[int] = []
    sizes = p.sizes()
    for c in sorted(sizes, key=lambda c: (-sizes[c], c)):
        members = [i for i in p.members[c] if i in table.values]
        members.sort(key=lambda i: (-table.values[i], i))
        order.extend(members[: quotas[c]])
    return ImmunizationPlan(tuple(order), kind, fraction)


def plan_cbf(g: Graph, fraction: float, rng: np.random.Generator) -> ImmunizationPlan:
    """Community-bridge finding by random walk, network structure unknown.

    Repeats until the quota is met: start a walk at a uniformly random
    unmarked node and step to uniformly random unmarked neighbors, never
    immediately backtracking. From the second step on, the first node found
    connected to at most one of the previously visited nodes is assumed to
    sit outside the walk's community and is marked for removal. Walks that
    exceed the step cap or run out of moves mark their last node instead, so
    every walk selects somebody.
    """
    quota = _quota(fraction, g.node_count)
    marked: set[int] = set()
    active = [int(i) for i in g.active_nodes()]
    if quota > len(active):
        raise CapacityError(f"quota {quota} exceeds {len(active)} active nodes")
    order: list[int] = []

    def eligible(node: int) -> bool:
        return node not in marked

    while len(order) < quota:
        pool = [i for i in active if eligible(i)]
        start = pool[int(rng.integers(len(pool)))]
        visited = [start]
        visited_set = {start}
        current = start
        previous = -1
        selection = None
        for _ in range(CBF_WALK_CAP):
            steps = [
                w
                for w in g.neighbors(current)
                if eligible(w) and w != previous and g.is_active(w)
            ]
            if not steps:
                break
            nxt = steps[int(rng.integers(len(steps)))]
            if len(visited) >= 2:
                back_links = sum(1 for w in g.neighbors(nxt) if w in visited_set)
                if back_links <= 1:
                    selection = nxt
                    break
            previous = current
            current = nxt
            if nxt not in visited_set:
                visited.append(nxt)
                visited_set.add(nxt)
        if selection is None:
            selection = current
        marked.add(selection)
        order.append(selection)
    return ImmunizationPlan(tuple(order), StrategyKind.CBF, fraction)


def plan_random(g: Graph, fraction: float, rng: np.random.Generator) -> ImmunizationPlan:
    """Uniform sample without replacement; the no-information baseline."""
    quota = _quota(fraction, g.node_count)
    active = g.active_nodes()
    if quota > active.size:
        raise CapacityError(f"quota {quota} exceeds {active.size} active nodes")
    order = rng.permutation(active)[:quota]
    return ImmunizationPlan(tuple(int(i) for i in order), StrategyKind.RANDOM, fraction)


def build_plan(
    g: Graph,
    kind: StrategyKind,
    fraction: float,
    *,
    partition: Partition | None = None,
    rng: np.random.Generator | None = None,
    recalc_interval: int = 1,
) -> ImmunizationPlan:
    """Dispatch to the right planner for ``kind``."""
    if kind in GLOBAL_KINDS:
        return plan_global(g, kind, fraction, recalc_interval=recalc_interval)
    if kind in COMMUNITY_KINDS:
        if partition is None:
            raise ConfigurationError(f"{kind.value} requires a community partition")
        return plan_community(g, partition, kind, fraction)
    if rng is None:
        raise ConfigurationError(f"{kind.value} requires a random generator")
    if kind is StrategyKind.CBF:
        return plan_cbf(g, fraction, rng)
    return plan_random(g, fraction, rng)


def plans_by_name() -> Mapping[str, StrategyKind]:
    return {kind.value: kind for kind in StrategyKind}
