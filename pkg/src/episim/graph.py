"""Undirected simple graphs, community partitions, and degree splitting.

Nodes are the integers ``0 .. node_count-1``. Graphs are immutable values:
"removing" nodes returns a new graph in which the victims keep their ids but
lose every incident edge, and are tracked as removed so that downstream code
(seeding, scoring, planning) can restrict itself to the active population.
This mirrors immunization: the individual stays in the population but can no
longer transmit anything.

Neighbor sets are kept sorted, so iteration order is deterministic under a
fixed seed.
"""

from __future__ import annotations

from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from .errors import (
    GraphInputError,
    NodeBoundsError,
    PartitionCoverageError,
    UndefinedRatioError,
)


class Graph:
    """Immutable undirected simple graph stored as per-node sorted neighbor
    tuples, with a lazily built CSR view for the numeric kernels."""

    __slots__ = ("_neighbors", "_edge_count", "_removed", "_csr")

    def __init__(self, neighbors: Sequence[Sequence[int]], removed: frozenset = frozenset()):
        self._neighbors = tuple(tuple(nbrs) for nbrs in neighbors)
        self._edge_count = sum(len(nbrs) for nbrs in self._neighbors) // 2
        self._removed = frozenset(removed)
        self._csr = None

    # -- construction ------------------------------------------------------

    @classmethod
    def from_edges(cls, edges: Iterable[Sequence[int]], node_count: int | None = None) -> "Graph":
        """Build a graph from an edge list.

        Self-loops and duplicate pairs (in either orientation) are rejected,
        not silently dropped. ``node_count`` may enlarge the node range beyond
        the largest endpoint, e.g. for graphs with trailing isolated nodes.
        """
        pairs = []
        max_id = -1
        seen: set[tuple[int, int]] = set()
        for edge in edges:
            u, v = edge
            u, v = int(u), int(v)
            if u < 0 or v < 0:
                raise GraphInputError(f"negative node id in edge ({u}, {v})")
            if u == v:
                raise GraphInputError(f"self-loop at node {u}")
            key = (u, v) if u < v else (v, u)
            if key in seen:
                raise GraphInputError(f"duplicate edge ({u}, {v})")
            seen.add(key)
            pairs.append(key)
            if v > max_id or u > max_id:
                max_id = max(u, v)
        n = max_id + 1
        if node_count is not None:
            if node_count < n:
                raise GraphInputError(
                    f"node_count {node_count} smaller than largest endpoint {max_id}"
                )
            n = node_count
        adjacency: list[list[int]] = [[] for _ in range(n)]
        for u, v in pairs:
            adjacency[u].append(v)
            adjacency[v].append(u)
        return cls([sorted(nbrs) for nbrs in adjacency])

    @classmethod
    def from_adjacency_sets(cls, adjacency: Sequence[set], removed: frozenset = frozenset()) -> "Graph":
        """Trusted constructor for generators that already maintain a valid
        symmetric adjacency. Only sorts; no validation."""
        return cls([sorted(nbrs) for nbrs in adjacency], removed)

    # -- basic accessors ----------------------------------------------------

    @property
    def node_count(self) -> int:
        return len(self._neighbors)

    @property
    def edge_count(self) -> int:
        return self._edge_count

    @property
    def removed(self) -> frozenset:
        """Ids whose edges were deleted by :func:`remove_nodes`."""
        return self._removed

    def neighbors(self, i: int) -> tuple[int, ...]:
        self._check_node(i)
        return self._neighbors[i]

    def degree(self, i: int) -> int:
        self._check_node(i)
        return len(self._neighbors[i])

    def is_active(self, i: int) -> bool:
        self._check_node(i)
        return i not in self._removed

    @property
    def active_count(self) -> int:
        return self.node_count - len(self._removed)

    def active_nodes(self) -> np.ndarray:
        """Sorted array of non-removed node ids."""
        if not self._removed:
            return np.arange(self.node_count, dtype=np.int64)
        mask = np.ones(self.node_count, dtype=bool)
        mask[list(self._removed)] = False
        return np.flatnonzero(mask).astype(np.int64)

    def iter_edges(self):
        """Yield each edge once as (u, v) with u < v, ascending."""
        for u, nbrs in enumerate(self._neighbors):
            for v in nbrs:
                if v > u:
                    yield (u, v)

    def degrees_array(self) -> np.ndarray:
        return np.array([len(nbrs) for nbrs in self._neighbors], dtype=np.int64)

    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """(indptr, indices) view of the adjacency; built once, then cached."""
        if self._csr is None:
            degrees = self.degrees_array()
            indptr = np.zeros(self.node_count + 1, dtype=np.int64)
            np.cumsum(degrees, out=indptr[1:])
            if self.edge_count:
                indices = np.concatenate(
                    [np.asarray(nbrs, dtype=np.int32) for nbrs in self._neighbors if nbrs]
                )
            else:
                indices = np.zeros(0, dtype=np.int32)
            self._csr = (indptr, indices)
        return self._csr

    def _check_node(self, i: int) -> None:
        if not 0 <= i < len(self._neighbors):
            raise NodeBoundsError(f"node {i} outside 0..{len(self._neighbors) - 1}")

    # -- value semantics -----------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._neighbors == other._neighbors and self._removed == other._removed

    def __hash__(self):
        return hash((self._neighbors, self._removed))

    def __repr__(self) -> str:
        return (
            f"Graph(node_count={self.node_count}, edge_count={self.edge_count}, "
            f"removed={len(self._removed)})"
        )


class Partition:
    """Assignment of every node to exactly one community."""

    __slots__ = ("_community_of", "_members")

    def __init__(self, community_of: Sequence[int]):
        self._community_of = tuple(int(c) for c in community_of)
        members: dict[int, list[int]] = {}
        for node, comm in enumerate(self._community_of):
            members.setdefault(comm, []).append(node)
        self._members = {c: tuple(nodes) for c, nodes in members.items()}

    @classmethod
    def from_pairs(cls, pairs: Iterable[Sequence[int]], node_count: int | None = None) -> "Partition":
        """Build from (node_id, community_id) pairs covering 0..n-1."""
        mapping: dict[int, int] = {}
        for node, comm in pairs:
            node, comm = int(node), int(comm)
            if node in mapping:
                raise PartitionCoverageError(f"node {node} assigned twice")
            mapping[node] = comm
        n = node_count if node_count is not None else (max(mapping) + 1 if mapping else 0)
        missing = [i for i in range(n) if i not in mapping]
        if missing:
            raise PartitionCoverageError(f"nodes without a community: {missing[:5]}...")
        return cls([mapping[i] for i in range(n)])

    @property
    def node_count(self) -> int:
        return len(self._community_of)

    @property
    def community_of(self) -> tuple[int, ...]:
        return self._community_of

    @property
    def members(self) -> Mapping[int, tuple[int, ...]]:
        return self._members

    def community(self, i: int) -> int:
        try:
            return self._community_of[i]
        except IndexError:
            raise PartitionCoverageError(f"node {i} not covered by partition") from None

    def community_ids(self) -> tuple[int, ...]:
        return tuple(sorted(self._members))

    def sizes(self) -> dict[int, int]:
        return {c: len(nodes) for c, nodes in self._members.items()}

    def labels_array(self) -> np.ndarray:
        return np.asarray(self._community_of, dtype=np.int64)

    def check_covers(self, g: Graph) -> None:
        if self.node_count != g.node_count:
            raise PartitionCoverageError(
                f"partition covers {self.node_count} nodes, graph has {g.node_count}"
            )

    def __eq__(self, other) -> bool:
        if not isinstance(other, Partition):
            return NotImplemented
        return self._community_of == other._community_of

    def __hash__(self):
        return hash(self._community_of)

    def __repr__(self) -> str:
        return f"Partition(nodes={self.node_count}, communities={len(self._members)})"


class DegreeSplit(NamedTuple):
    """A node's degree split into same-community and cross-community links."""

    k_in: int
    k_out: int

    @property
    def total(self) -> int:
        return self.k_in + self.k_out


# -- operations --------------------------------------------------------------


def build_from_edges(edges: Iterable[Sequence[int]], node_count: int | None = None) -> Graph:
    return Graph.from_edges(edges, node_count=node_count)


def degree(g: Graph, i: int) -> int:
    return g.degree(i)


def split_degree(g: Graph, p: Partition, i: int) -> DegreeSplit:
    """Split node ``i``'s degree into intra- and inter-community parts."""
    p.check_covers(g)
    own = p.community(i)
    k_in = sum(1 for j in g.neighbors(i) if p.community(j) == own)
    return DegreeSplit(k_in=k_in, k_out=g.degree(i) - k_in)


def inter_community_fraction(g: Graph, p: Partition) -> float:
    """Fraction of edges whose endpoints lie in different communities."""
    p.check_covers(g)
    if g.edge_count == 0:
        raise UndefinedRatioError("inter-community fraction undefined on an edgeless graph")
    labels = p.labels_array()
    indptr, indices = g.csr()
    src = np.repeat(np.arange(g.node_count), np.diff(indptr))
    cross = int(np.count_nonzero(labels[src] != labels[indices])) // 2
    return cross / g.edge_count


def mu_limit(g: Graph, p: Partition) -> float:
    """Mixing value above which the largest community is no longer a
    community in any meaningful sense: (n - n_max) / n."""
    p.check_covers(g)
    if not p.members:
        raise PartitionCoverageError("partition has no communities")
    n = g.node_count
    n_max = max(len(nodes) for nodes in p.members.values())
    return (n - n_max) / n


def remove_nodes(g: Graph, victims: Iterable[int]) -> Graph:
    """Return a copy of ``g`` with every victim isolated (all incident edges
    deleted) and recorded as removed. The input graph is untouched."""
    victim_set = {int(v) for v in victims}
    for v in victim_set:
        g._check_node(v)
    if not victim_set:
        return Graph(g._neighbors, g.removed)
    adjacency = []
    for i, nbrs in enumerate(g._neighbors):
        if i in victim_set:
            adjacency.append(())
        else:
            adjacency.append(tuple(j for j in nbrs if j not in victim_set))
    return Graph(adjacency, g.removed | frozenset(victim_set))
