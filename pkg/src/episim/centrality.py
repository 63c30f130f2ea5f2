"""Node influence scores: total degree, shortest-path betweenness, and the
community-level degree measures (indegree, outdegree and their differences).

Betweenness is kept unnormalized. Only the induced ranking matters for
immunization and normalization is a per-graph constant, so rankings are
unaffected. Disconnected pairs contribute zero.

Two betweenness backends share the same mathematics:

  * graphs with at most ``EXACT_BETWEENNESS_MAX_NODES`` active nodes use a
    pure-Python Brandes accumulation in exact rational arithmetic, so two
    mathematically equal scores convert to the *same* float and tie-breaking
    by node id is well defined;
  * larger graphs use the compiled float64 kernel.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Mapping

import numpy as np

from . import _kernels
from .errors import ConfigurationError
from .graph import Graph, Partition, split_degree

EXACT_BETWEENNESS_MAX_NODES = 64


class ScoreKind(str, Enum):
    DEGREE = "degree"
    BETWEENNESS = "betweenness"
    IN_DEGREE = "indegree"
    OUT_DEGREE = "outdegree"
    IN_OUT_DIFF = "inout_diff"
    OUT_IN_DIFF = "outin_diff"


COMMUNITY_KINDS = (
    ScoreKind.IN_DEGREE,
    ScoreKind.OUT_DEGREE,
    ScoreKind.IN_OUT_DIFF,
    ScoreKind.OUT_IN_DIFF,
)


@dataclass(frozen=True)
class ScoreTable:
    """Per-node scores of one kind, covering exactly the active nodes."""

    kind: ScoreKind
    values: Mapping[int, float]

    def ranked(self) -> list[int]:
        """Node ids ordered by descending score, ties by ascending id."""
        return sorted(self.values, key=lambda i: (-self.values[i], i))


def degree_scores(g: Graph) -> ScoreTable:
    """Total degree of every active node."""
    return ScoreTable(
        kind=ScoreKind.DEGREE,
        values={int(i): g.degree(int(i)) for i in g.active_nodes()},
    )


def community_scores(g: Graph, p: Partition, kind: ScoreKind) -> ScoreTable:
    """Community-level scores: k_in, k_out, k_in - k_out or k_out - k_in."""
    if kind not in COMMUNITY_KINDS:
        raise ConfigurationError(f"{kind} is not a community score kind")
    p.check_covers(g)
    values: dict[int, int] = {}
    for i in g.active_nodes():
        i = int(i)
        ks = split_degree(g, p, i)
        if kind is ScoreKind.IN_DEGREE:
            values[i] = ks.k_in
        elif kind is ScoreKind.OUT_DEGREE:
            values[i] = ks.k_out
        elif kind is ScoreKind.IN_OUT_DIFF:
            values[i] = ks.k_in - ks.k_out
        else:
            values[i] = ks.k_out - ks.k_in
    return ScoreTable(kind=kind, values=values)


def betweenness(g: Graph) -> ScoreTable:
    """Shortest-path betweenness of every active node, each unordered pair
    counted once (Brandes-style single-source accumulation)."""
    alive = np.ones(g.node_count, dtype=bool)
    if g.removed:
        alive[list(g.removed)] = False
    scores = betweenness_array(g, alive)
    return ScoreTable(
        kind=ScoreKind.BETWEENNESS,
        values={int(i): float(scores[i]) for i in np.flatnonzero(alive)},
    )


def betweenness_array(g: Graph, alive: np.ndarray) -> np.ndarray:
    """Betweenness of the alive-induced subgraph as a dense array (removed /
    dead entries are 0). Shared by :func:`betweenness` and the planners so
    both always agree bit-for-bit."""
    n_alive = int(np.count_nonzero(alive))
    if n_alive <= EXACT_BETWEENNESS_MAX_NODES or not _kernels.HAVE_NUMBA:
        return _betweenness_exact(g, alive)
    indptr, indices = g.csr()
    sub_indptr, sub_indices, alive_ids = _kernels.compact_alive_csr(indptr, indices, alive)
    scores = np.zeros(g.node_count, dtype=np.float64)
    scores[alive_ids] = _kernels.brandes_betweenness(sub_indptr, sub_indices)
    return scores


def _betweenness_exact(g: Graph, alive: np.ndarray) -> np.ndarray:
    """Brandes accumulation with integer path counts and Fraction
    dependencies; exact, then rounded once to float64."""
    n = g.node_count
    bc = [Fraction(0)] * n
    for s in range(n):
        if not alive[s]:
            continue
        dist = [-1] * n
        sigma = [0] * n
        preds: list[list[int]] = [[] for _ in range(n)]
        dist[s] = 0
        sigma[s] = 1
        order = [s]
        head = 0
        while head < len(order):
            v = order[head]
            head += 1
            for w in g.neighbors(v):
                if not alive[w]:
                    continue
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    order.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = [Fraction(0)] * n
        for w in reversed(order[1:]):
            coeff = (1 + delta[w]) / sigma[w]
            for v in preds[w]:
                delta[v] += sigma[v] * coeff
            bc[w] += delta[w]
    return np.array([float(x / 2) for x in bc], dtype=np.float64)
