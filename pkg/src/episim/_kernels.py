"""Numeric kernels for large graphs.

The Brandes accumulation is the only hot spot in the package (it runs
thousands of times during a recalculated global-betweenness plan), so it is
JIT-compiled when numba is importable. The pure-numpy fallback keeps the
package functional without it, at pure-Python speed.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap


@njit(cache=True)
def brandes_betweenness(indptr, indices):  # pragma: no cover - compiled
    """Unnormalized shortest-path betweenness of a compact CSR graph.

    Each unordered pair is counted once (the doubled undirected accumulation
    is halved at the end). Pairs in different components contribute nothing,
    which also means each source only ever pays for its own component.
    """
    n = indptr.size - 1
    bc = np.zeros(n, dtype=np.float64)
    dist = np.full(n, -1, dtype=np.int32)
    sigma = np.zeros(n, dtype=np.float64)
    delta = np.zeros(n, dtype=np.float64)
    order = np.empty(n, dtype=np.int32)
    for s in range(n):
        count = 0
        head = 0
        dist[s] = 0
        sigma[s] = 1.0
        order[count] = s
        count += 1
        while head < count:
            v = order[head]
            head += 1
            dv = dist[v]
            for ei in range(indptr[v], indptr[v + 1]):
                w = indices[ei]
                if dist[w] < 0:
                    dist[w] = dv + 1
                    order[count] = w
                    count += 1
                if dist[w] == dv + 1:
                    sigma[w] += sigma[v]
        for i in range(count - 1, 0, -1):
            w = order[i]
            coeff = (1.0 + delta[w]) / sigma[w]
            dw = dist[w]
            for ei in range(indptr[w], indptr[w + 1]):
                v = indices[ei]
                if dist[v] == dw - 1:
                    delta[v] += sigma[v] * coeff
            bc[w] += delta[w]
        for i in range(count):
            v = order[i]
            dist[v] = -1
            sigma[v] = 0.0
            delta[v] = 0.0
    return bc * 0.5


def compact_alive_csr(indptr, indices, alive):
    """Subgraph CSR induced by the alive mask, with renumbered node ids.
    Returns (sub_indptr, sub_indices, alive_node_ids)."""
    n = alive.size
    alive_ids = np.flatnonzero(alive)
    new_id = np.full(n, -1, dtype=np.int32)
    new_id[alive_ids] = np.arange(alive_ids.size, dtype=np.int32)
    src = np.repeat(np.arange(n), np.diff(indptr))
    keep = alive[src] & alive[indices]
    sub_dst = new_id[indices[keep]]
    sub_counts = np.bincount(new_id[src[keep]], minlength=alive_ids.size)
    sub_indptr = np.zeros(alive_ids.size + 1, dtype=np.int64)
    np.cumsum(sub_counts, out=sub_indptr[1:])
    return sub_indptr, sub_dst.astype(np.int32), alive_ids
