"""The goeBURST algorithm packaged for the job engine."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping

from phylograph.domain.repositories import ProfileRepository
from phylograph.engine.registry import (
    Algorithm,
    AlgorithmDescriptor,
    JobContext,
    KIND_INFERENCE,
    Parameter,
)
from phylograph.graphstore import GraphStore, Transaction

from .distance import build_matrix
from .goeburst import DEFAULT_LEVELS, Edge, founder, goeburst, rank_vertices
from .storage import InferenceResultRepository

GOEBURST = "algorithms.inference.goeburst"

DESCRIPTOR = AlgorithmDescriptor(
    name=GOEBURST,
    kind=KIND_INFERENCE,
    parameters=(Parameter("lvs", int, required=False, default=DEFAULT_LEVELS),),
)


@dataclass(frozen=True, slots=True)
class _Input:
    profiles: tuple[tuple[str, tuple[str | None, ...]], ...]
    frequencies: Mapping[str, int]


@dataclass(frozen=True, slots=True)
class _Output:
    edges: tuple[Edge, ...]
    founder: str
    profiles: tuple[str, ...]


class GoeBurstAlgorithm(Algorithm):
    def __init__(self, store: GraphStore):
        self._profiles = ProfileRepository(store)
        self._results = InferenceResultRepository(store)
        self._context: JobContext | None = None
        self._lvs = DEFAULT_LEVELS

    def init(self, context: JobContext, parameters: Mapping[str, Any]) -> None:
        self._context = context
        self._lvs = parameters["lvs"]

    def read(self, tx: Transaction) -> _Input:
        ctx = self._context
        rows = self._profiles.list(tx, ctx.project, ctx.dataset)
        return _Input(
            profiles=tuple((p.id, p.alleles) for p in rows),
            frequencies={p.id: p.frequency for p in rows},
        )

    def compute(self, data: _Input) -> _Output:
        matrix = build_matrix(data.profiles)
        ranks = rank_vertices(matrix, self._lvs, data.frequencies)
        edges = goeburst(matrix, self._lvs, data.frequencies)
        return _Output(tuple(edges), founder(ranks), matrix.ids)

    def write(self, tx: Transaction, result: _Output) -> None:
        ctx = self._context
        self._results.persist(
            tx, ctx.project, ctx.dataset, ctx.result_id, result.edges,
            algorithm=GOEBURST,
            parameters={"lvs": self._lvs},
            founder=result.founder,
            profiles=result.profiles,
        )
