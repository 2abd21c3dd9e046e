"""Pairwise Hamming distances over allelic profiles.

A missing allele (``None``) differs from everything, including another
missing allele — the conservative MLST reading. ``hamming`` is the
definition; ``build_matrix`` is the vectorized all-pairs version used on
real datasets and must agree with it entry for entry.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


class LengthMismatchError(ValueError):
    pass


def hamming(a: Sequence[str | None], b: Sequence[str | None]) -> int:
    if len(a) != len(b):
        raise LengthMismatchError(f"profile lengths differ: {len(a)} vs {len(b)}")
    return sum(1 for x, y in zip(a, b)
               if x is None or y is None or x != y)


@dataclass(frozen=True, slots=True)
class DistanceMatrix:
    """Symmetric all-pairs distances for one ordered set of profiles."""

    ids: tuple[str, ...]
    distances: np.ndarray  # (n, n) int32, zero diagonal
    loci: int

    def __len__(self) -> int:
        return len(self.ids)

    def distance(self, i: int, j: int) -> int:
        return int(self.distances[i, j])


def build_matrix(
        profiles: Sequence[tuple[str, Sequence[str | None]]]) -> DistanceMatrix:
    """All-pairs Hamming matrix for ``(id, alleles)`` pairs.

    Profiles are integer-coded per locus so the pair comparison runs as a
    blocked numpy broadcast instead of a Python double loop.
    """
    if not profiles:
        raise ValueError("need at least one profile")
    ids = tuple(pid for pid, _ in profiles)
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate profile ids")
    n = len(profiles)
    loci = len(profiles[0][1])
    codes = np.full((n, loci), -1, dtype=np.int32)
    catalogs: list[dict[str, int]] = [{} for _ in range(loci)]
    for row, (pid, alleles) in enumerate(profiles):
        if len(alleles) != loci:
            raise LengthMismatchError(
                f"profile {pid!r} has {len(alleles)} slots, expected {loci}")
        for col, allele in enumerate(alleles):
            if allele is None:
                continue
            catalog = catalogs[col]
            codes[row, col] = catalog.setdefault(allele, len(catalog))

    distances = np.empty((n, n), dtype=np.int32)
    block = max(1, 8_000_000 // max(1, n * max(loci, 1)))
    for start in range(0, n, block):
        end = min(n, start + block)
        same = (codes[start:end, None, :] == codes[None, :, :]) \
            & (codes[start:end, None, :] >= 0)
        distances[start:end] = loci - same.sum(axis=2, dtype=np.int32)
    np.fill_diagonal(distances, 0)
    distances.setflags(write=False)
    return DistanceMatrix(ids, distances, loci)
