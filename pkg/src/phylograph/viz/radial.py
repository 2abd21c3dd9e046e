"""Radial tree layout: wedges proportional to leaf counts.

The root sits at the origin and owns the full circle. Every child is
granted a wedge of width 2π · (leaves under it / total leaves); the
children split their parent's wedge in ascending-id order, and each child
is placed one edge length away from its parent along the wedge's bisector.
Geometry follows from three numbers per node — wedge start, wedge width,
leaf count — so the layout is linear in the tree size and deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

Coordinate = tuple[str, float, float]
WeightedEdge = tuple[str, str, float]


class CycleError(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class LayoutTree:
    root: str
    children: Mapping[str, tuple[tuple[str, float], ...]]
    leaf_counts: Mapping[str, int]

    @property
    def nodes(self) -> list[str]:
        return list(self.children)

    @property
    def total_leaves(self) -> int:
        return self.leaf_counts[self.root]


def to_tree(edges: Sequence[WeightedEdge], root: str | None = None,
            nodes: Iterable[str] | None = None) -> LayoutTree:
    """Root an undirected spanning tree.

    ``nodes`` may add isolated vertices (a one-node tree has no edges to
    mention it). Defaults: the node set is whatever the edges touch, and
    the root is the smallest id. Disconnected or cyclic input is refused —
    use :func:`to_forest` when components are expected.
    """
    trees = to_forest(edges, root=root, nodes=nodes)
    if len(trees) != 1:
        raise ValueError(f"edges form {len(trees)} components, not a tree")
    return trees[0]


def to_forest(edges: Sequence[WeightedEdge], root: str | None = None,
              nodes: Iterable[str] | None = None) -> list[LayoutTree]:
    """Root every component; ``root`` names the root of its own component,
    all others take their smallest id. Components come back ordered by
    root id."""
    adjacency: dict[str, list[tuple[str, float]]] = {}
    for node in nodes or ():
        adjacency.setdefault(node, [])
    if root is not None:
        adjacency.setdefault(root, [])
    for a, b, weight in edges:
        if a == b:
            raise CycleError(f"self-loop on {a!r}")
        adjacency.setdefault(a, []).append((b, weight))
        adjacency.setdefault(b, []).append((a, weight))

    unseen = set(adjacency)
    trees = []
    while unseen:
        component = _component(adjacency, min(unseen))
        unseen -= component
        tree_root = root if root in component else min(component)
        trees.append(_root_component(adjacency, component, tree_root))
    trees.sort(key=lambda t: t.root)
    return trees


def _component(adjacency, start: str) -> set[str]:
    seen = {start}
    stack = [start]
    while stack:
        for neighbor, _ in adjacency[stack.pop()]:
            if neighbor not in seen:
                seen.add(neighbor)
                stack.append(neighbor)
    return seen


def _root_component(adjacency, component: set[str], root: str) -> LayoutTree:
    edge_count = sum(len(adjacency[n]) for n in component) // 2
    if edge_count != len(component) - 1:
        raise CycleError(
            f"component of {root!r} has {edge_count} edges over "
            f"{len(component)} nodes")

    children: dict[str, list[tuple[str, float]]] = {n: [] for n in component}
    order: list[str] = []
    seen = {root}
    stack = [root]
    while stack:
        node = stack.pop()
        order.append(node)
        for neighbor, weight in sorted(adjacency[node]):
            if neighbor not in seen:
                seen.add(neighbor)
                children[node].append((neighbor, weight))
                stack.append(neighbor)

    leaves = dict.fromkeys(component, 0)
    for node in reversed(order):
        kids = children[node]
        leaves[node] = sum(leaves[c] for c, _ in kids) if kids else 1
    return LayoutTree(root,
                      {n: tuple(children[n]) for n in component},
                      leaves)


def wedge_spans(tree: LayoutTree) -> dict[str, tuple[float, float]]:
    """Each node's (wedge start, wedge width) in radians; the root owns
    (0, 2π). Exposed so the partition invariant is checkable from outside."""
    total = tree.total_leaves
    spans = {tree.root: (0.0, math.tau)}
    stack = [tree.root]
    while stack:
        node = stack.pop()
        cursor = spans[node][0]
        for child, _ in tree.children[node]:
            width = math.tau * tree.leaf_counts[child] / total
            spans[child] = (cursor, width)
            cursor += width
            stack.append(child)
    return spans


def radial_layout(tree: LayoutTree) -> list[Coordinate]:
    """One coordinate per node, sorted by id; the root is at (0, 0)."""
    spans = wedge_spans(tree)
    positions: list[Coordinate] = [(tree.root, 0.0, 0.0)]
    located = {tree.root: (0.0, 0.0)}
    stack = [tree.root]
    while stack:
        node = stack.pop()
        x, y = located[node]
        for child, weight in tree.children[node]:
            start, width = spans[child]
            theta = start + width / 2.0
            pos = (x + weight * math.cos(theta), y + weight * math.sin(theta))
            located[child] = pos
            positions.append((child, pos[0], pos[1]))
            stack.append(child)
    positions.sort(key=lambda c: c[0])
    return positions


def layout_forest(trees: Sequence[LayoutTree]) -> list[Coordinate]:
    """Lay components on one horizontal line, left to right by root id,
    with a one-unit gap between bounding boxes. A single tree keeps its
    natural coordinates (root at the origin)."""
    ordered = sorted(trees, key=lambda t: t.root)
    out: list[Coordinate] = []
    cursor: float | None = None
    for tree in ordered:
        placed = radial_layout(tree)
        xs = [x for _, x, _ in placed]
        left, right = min(xs), max(xs)
        shift = 0.0 if cursor is None else cursor - left
        out.extend((pid, x + shift, y) for pid, x, y in placed)
        cursor = right + shift + 1.0
    out.sort(key=lambda c: c[0])
    return out
