"""Textual file formats used by the CLI, the service and the disk cache.

Formats:
  * edge list   - one ``u v`` pair per line, ``#`` lines are comments
  * communities - one ``node_id community_id`` line per node
  * metadata    - ``key=value`` lines (generator parameters + achieved mixing)
  * plan CSV    - ``rank,node_id,strategy,fraction``
  * scores CSV  - ``node_id,score,kind``
  * series CSV  - ``step,s_count,i_count,r_count``

Writers are deterministic: same object, same bytes.
"""

from __future__ import annotations

import os
from pathlib import Path
from typing import Iterable, Sequence

from .errors import GraphInputError
from .graph import Graph, Partition


def _float_repr(x: float) -> str:
    return repr(float(x))


# -- edge list ----------------------------------------------------------------


def format_edge_list(g: Graph) -> str:
    lines = [f"{u} {v}" for u, v in g.iter_edges()]
    lines.append("")
    return "\n".join(lines)


def write_edge_list(g: Graph, path: str | Path) -> None:
    _atomic_write(path, format_edge_list(g))


def parse_edge_list(text: str, node_count: int | None = None) -> Graph:
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphInputError(f"edge list line {lineno}: expected two ids, got {raw!r}")
        try:
            edges.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise GraphInputError(f"edge list line {lineno}: non-integer id in {raw!r}") from None
    return Graph.from_edges(edges, node_count=node_count)


def read_edge_list(path: str | Path, node_count: int | None = None) -> Graph:
    return parse_edge_list(Path(path).read_text(), node_count=node_count)


# -- community file -------------------------------------------------------------


def format_communities(p: Partition) -> str:
    lines = [f"{node} {comm}" for node, comm in enumerate(p.community_of)]
    lines.append("")
    return "\n".join(lines)


def write_communities(p: Partition, path: str | Path) -> None:
    _atomic_write(path, format_communities(p))


def parse_communities(text: str, node_count: int | None = None) -> Partition:
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphInputError(
                f"community file line {lineno}: expected 'node community', got {raw!r}"
            )
        pairs.append((int(parts[0]), int(parts[1])))
    return Partition.from_pairs(pairs, node_count=node_count)


def read_communities(path: str | Path, node_count: int | None = None) -> Partition:
    return parse_communities(Path(path).read_text(), node_count=node_count)


# -- metadata sidecar ------------------------------------------------------------


def format_metadata(items: dict) -> str:
    lines = []
    for key, value in items.items():
        if isinstance(value, float):
            value = _float_repr(value)
        lines.append(f"{key}={value}")
    lines.append("")
    return "\n".join(lines)


def write_metadata(items: dict, path: str | Path) -> None:
    _atomic_write(path, format_metadata(items))


def parse_metadata(text: str) -> dict[str, str]:
    items: dict[str, str] = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition("=")
        items[key.strip()] = value.strip()
    return items


# -- plan / scores / series CSV ---------------------------------------------------

PLAN_HEADER = "rank,node_id,strategy,fraction"
SCORES_HEADER = "node_id,score,kind"
SERIES_HEADER = "step,s_count,i_count,r_count"


def format_plan_csv(order: Sequence[int], strategy: str, fraction: float) -> str:
    lines = [PLAN_HEADER]
    frac = _float_repr(fraction)
    for rank, node in enumerate(order):
        lines.append(f"{rank},{node},{strategy},{frac}")
    lines.append("")
    return "\n".join(lines)


def parse_plan_csv(text: str) -> list[int]:
    """Node ids of a plan CSV, in rank order."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != PLAN_HEADER:
        raise GraphInputError(f"plan CSV must start with header {PLAN_HEADER!r}")
    return [int(line.split(",")[1]) for line in lines[1:]]


def format_scores_csv(values: dict, kind: str) -> str:
    lines = [SCORES_HEADER]
    for node in sorted(values):
        score = values[node]
        score_text = _float_repr(score) if isinstance(score, float) else str(score)
        lines.append(f"{node},{score_text},{kind}")
    lines.append("")
    return "\n".join(lines)


def format_series_csv(series: Iterable[Sequence[int]]) -> str:
    lines = [SERIES_HEADER]
    for step, (s, i, r) in enumerate(series):
        lines.append(f"{step},{s},{i},{r}")
    lines.append("")
    return "\n".join(lines)


# -- helpers ----------------------------------------------------------------------


def _atomic_write(path: str | Path, text: str) -> None:
    """Write via a temp file + rename so concurrent readers never see a
    partial file (cache directories are shared between workers)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(f".{path.name}.{os.getpid()}.tmp")
    tmp.write_text(text)
    os.replace(tmp, path)
