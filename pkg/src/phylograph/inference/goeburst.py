"""goeBURST: a minimum spanning tree over the complete profile graph.

Kruskal's algorithm with a *total* edge order. Ties in Hamming distance
break on the endpoints' neighborhood counts (how many profiles sit at
distance exactly 1, 2, … — single/double/triple locus variants), then on
isolate frequency, then on profile ids, so the result is deterministic for
a given input.

``edge_compare`` is the order's definition in plain Python; ``goeburst``
evaluates the same order via vectorized key columns and ``np.lexsort`` so
datasets in the thousands stay fast. Tests hold the two routes together.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .distance import DistanceMatrix

DEFAULT_LEVELS = 3

Edge = tuple[str, str, int]


@dataclass(frozen=True, slots=True)
class VertexRank:
    """Tie-break data for one profile: counts[k-1] profiles sit at
    distance exactly k, for k = 1..lvs."""

    id: str
    counts: tuple[int, ...]
    frequency: int


def rank_vertices(matrix: DistanceMatrix, lvs: int = DEFAULT_LEVELS,
                  frequencies: Mapping[str, int] | None = None
                  ) -> list[VertexRank]:
    _check_lvs(matrix, lvs)
    frequencies = frequencies or {}
    counts = np.stack([(matrix.distances == k).sum(axis=1, dtype=np.int64)
                       for k in range(1, lvs + 1)], axis=1)
    return [VertexRank(pid, tuple(int(c) for c in counts[i]),
                       int(frequencies.get(pid, 0)))
            for i, pid in enumerate(matrix.ids)]


def edge_compare(e1: Edge, e2: Edge, ranks: Mapping[str, VertexRank],
                 lvs: int = DEFAULT_LEVELS) -> int:
    """-1, 0 or 1 as e1 orders before, with, or after e2.

    Ascending distance; per level the higher endpoint count descending,
    then the lower one; then endpoint frequencies descending the same way;
    finally ascending (min id, max id). Distinct edges never compare equal
    because the id pair is unique.
    """
    k1 = _edge_key(e1, ranks, lvs)
    k2 = _edge_key(e2, ranks, lvs)
    return (k1 > k2) - (k1 < k2)


def _edge_key(edge: Edge, ranks: Mapping[str, VertexRank], lvs: int):
    a, b, distance = edge
    ra, rb = ranks[a], ranks[b]
    key: list[object] = [distance]
    for k in range(lvs):
        ca, cb = ra.counts[k], rb.counts[k]
        key.append(-max(ca, cb))
        key.append(-min(ca, cb))
    key.append(-max(ra.frequency, rb.frequency))
    key.append(-min(ra.frequency, rb.frequency))
    key.extend(sorted((a, b)))
    return tuple(key)


class _DisjointSet:
    __slots__ = ("parent", "rank")

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1
        return True


def goeburst(matrix: DistanceMatrix, lvs: int = DEFAULT_LEVELS,
             frequencies: Mapping[str, int] | None = None) -> list[Edge]:
    """Spanning tree edges in acceptance order, each as (id, id, distance)
    with the id pair sorted. n = 1 yields no edges."""
    _check_lvs(matrix, lvs)
    n = len(matrix)
    if n < 2:
        return []
    ranks = rank_vertices(matrix, lvs, frequencies)

    iu, ju = np.triu_indices(n, k=1)
    counts = np.array([r.counts for r in ranks], dtype=np.int64)
    freq = np.array([r.frequency for r in ranks], dtype=np.int64)
    # profile ids compared as strings == compared by their sorted position
    id_pos = np.empty(n, dtype=np.int64)
    id_pos[np.argsort(np.array(matrix.ids))] = np.arange(n)

    keys = [matrix.distances[iu, ju].astype(np.int64)]
    for k in range(lvs):
        ca, cb = counts[iu, k], counts[ju, k]
        keys.append(-np.maximum(ca, cb))
        keys.append(-np.minimum(ca, cb))
    keys.append(-np.maximum(freq[iu], freq[ju]))
    keys.append(-np.minimum(freq[iu], freq[ju]))
    keys.append(np.minimum(id_pos[iu], id_pos[ju]))
    keys.append(np.maximum(id_pos[iu], id_pos[ju]))
    order = np.lexsort(tuple(reversed(keys)))

    forest = _DisjointSet(n)
    edges: list[Edge] = []
    dist = matrix.distances
    for e in order:
        i, j = int(iu[e]), int(ju[e])
        if forest.union(i, j):
            a, b = sorted((matrix.ids[i], matrix.ids[j]))
            edges.append((a, b, int(dist[i, j])))
            if len(edges) == n - 1:
                break
    return edges


def founder(ranks: Iterable[VertexRank]) -> str:
    """The vertex every tie prefers: most close neighbors level by level,
    then highest frequency, then the smallest id."""
    best = min(ranks, key=lambda r: (tuple(-c for c in r.counts),
                                     -r.frequency, r.id))
    return best.id


def _check_lvs(matrix: DistanceMatrix, lvs: int) -> None:
    if not isinstance(lvs, int) or isinstance(lvs, bool) or not 1 <= lvs:
        raise ValueError(f"lvs must be a positive integer, got {lvs!r}")
    if lvs > matrix.loci:
        raise ValueError(
            f"lvs={lvs} exceeds the schema's {matrix.loci} loci")
