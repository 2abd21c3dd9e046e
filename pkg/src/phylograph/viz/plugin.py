"""The radial layout packaged for the job engine."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping

from phylograph.domain.errors import UnknownInferenceError
from phylograph.engine.registry import (
    Algorithm,
    AlgorithmDescriptor,
    JobContext,
    KIND_VISUALIZATION,
)
from phylograph.graphstore import GraphStore, Transaction
from phylograph.inference.storage import InferenceResultRepository

from .radial import Coordinate, layout_forest, to_forest
from .storage import VisualizationRepository

RADIAL = "algorithms.visualization.radial"

DESCRIPTOR = AlgorithmDescriptor(name=RADIAL, kind=KIND_VISUALIZATION)


@dataclass(frozen=True, slots=True)
class _Input:
    edges: tuple[tuple[str, str, float], ...]
    nodes: tuple[str, ...]
    root: str | None


class RadialLayoutAlgorithm(Algorithm):
    def __init__(self, store: GraphStore):
        self._results = InferenceResultRepository(store)
        self._layouts = VisualizationRepository(store)
        self._context: JobContext | None = None

    def init(self, context: JobContext, parameters: Mapping[str, Any]) -> None:
        self._context = context

    def read(self, tx: Transaction) -> _Input:
        ctx = self._context
        result = self._results.fetch(tx, ctx.project, ctx.dataset,
                                     ctx.inference)
        if result is None:
            raise UnknownInferenceError(
                f"inference {ctx.inference!r} does not exist in dataset "
                f"{ctx.dataset!r}")
        return _Input(
            edges=tuple((a, b, float(d)) for a, b, d in result.edges),
            nodes=result.profiles,
            root=result.founder,
        )

    def compute(self, data: _Input) -> tuple[Coordinate, ...]:
        trees = to_forest(data.edges, root=data.root, nodes=data.nodes)
        return tuple(layout_forest(trees))

    def write(self, tx: Transaction, coordinates: tuple[Coordinate, ...]) -> None:
        ctx = self._context
        self._layouts.persist(tx, ctx.project, ctx.dataset, ctx.inference,
                              ctx.result_id, coordinates, algorithm=RADIAL)
