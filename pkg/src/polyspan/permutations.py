"""Node relabelling helpers for equivariance checks.

Relabelling keeps edge identity: edge k stays at position k with its
endpoints renamed, so tables indexed by sparse edges do not move.  On
the fully-connected graph the edge set is forced to canonical order,
so the graph itself is unchanged and pair-indexed tables move by the
permutation on both coordinates instead.
"""

from __future__ import annotations

from typing import Sequence

from .carrier import GraphContext


def permute_graph(graph: GraphContext, perm: Sequence[int]) -> GraphContext:
    """Rename nodes; edge order is preserved."""
    if graph.full:
        return graph
    edges = tuple((perm[u], perm[v], w) for (u, v, w) in graph.edges)
    return GraphContext(graph.n, edges, full=False)


def permute_node_rows(rows: Sequence, perm: Sequence[int]) -> tuple:
    """Row u of the result is the old row at the node now named u."""
    out = [None] * len(rows)
    for u, row in enumerate(rows):
        out[perm[u]] = row
    return tuple(out)


def permute_pair_rows(rows: Sequence, perm: Sequence[int], n: int) -> tuple:
    """Move row (i, j) of a square table to (perm[i], perm[j])."""
    out = [None] * len(rows)
    for i in range(n):
        for j in range(n):
            out[perm[i] * n + perm[j]] = rows[i * n + j]
    return tuple(out)


def max_relative_diff(rows_a: Sequence, rows_b: Sequence) -> float:
    """Largest entrywise |a - b| / max(|a|, |b|, 1) over two row tables."""
    worst = 0.0
    for ra, rb in zip(rows_a, rows_b, strict=True):
        for a, b in zip(ra, rb, strict=True):
            denom = max(abs(a), abs(b), 1.0)
            worst = max(worst, abs(a - b) / denom)
    return worst
