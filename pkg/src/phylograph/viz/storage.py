"""Persistence of computed layouts, keyed by (inference id, layout id).

A layout is a single node holding the coordinate list; several layout ids
can hang off one inference, and re-persisting an id swaps its coordinates
atomically in the caller's transaction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

from phylograph.domain.errors import UnknownInferenceError
from phylograph.domain.repositories import check_id, scope_key
from phylograph.graphstore import GraphStore, Transaction
from phylograph.inference.storage import INFERENCE

from .radial import Coordinate

VISUALIZATION = "Visualization"


@dataclass(frozen=True, slots=True)
class VisualizationResult:
    id: str
    inference: str
    algorithm: str
    coordinates: tuple[Coordinate, ...]


class VisualizationRepository:
    def __init__(self, store: GraphStore):
        self.store = store
        store.ensure_node_index(VISUALIZATION, "key")
        store.ensure_node_index(VISUALIZATION, "inference")

    def persist(self, tx: Transaction, project_id: str, dataset_id: str,
                inference_id: str, visualization_id: str,
                coordinates: Sequence[Coordinate], *,
                algorithm: str = "") -> None:
        check_id(visualization_id, "visualization id")
        inference_key = scope_key(project_id, dataset_id, inference_id)
        if not self.store.match_nodes(tx, INFERENCE, {"key": inference_key}):
            raise UnknownInferenceError(
                f"inference {inference_id!r} does not exist in dataset "
                f"{dataset_id!r}")
        props = {
            "key": scope_key(project_id, dataset_id, inference_id,
                             visualization_id),
            "id": visualization_id,
            "inference": inference_key,
            "algorithm": algorithm,
            "coordinates": json.dumps(
                [[pid, x, y] for pid, x, y in coordinates]),
        }
        existing = self.store.match_nodes(tx, VISUALIZATION,
                                          {"key": props["key"]})
        if existing:
            self.store.update_node(tx, existing[0].id, props)
        else:
            self.store.create_node(tx, {VISUALIZATION}, props)

    def fetch(self, tx: Transaction, project_id: str, dataset_id: str,
              inference_id: str, visualization_id: str
              ) -> VisualizationResult | None:
        key = scope_key(project_id, dataset_id, inference_id,
                        visualization_id)
        hits = self.store.match_nodes(tx, VISUALIZATION, {"key": key})
        if not hits:
            return None
        props = hits[0].properties
        coordinates = tuple((pid, float(x), float(y))
                            for pid, x, y in json.loads(props["coordinates"]))
        return VisualizationResult(
            id=visualization_id,
            inference=inference_id,
            algorithm=props["algorithm"],
            coordinates=coordinates,
        )

    def list_ids(self, tx: Transaction, project_id: str, dataset_id: str,
                 inference_id: str) -> list[str]:
        records = self.store.match_nodes(
            tx, VISUALIZATION,
            {"inference": scope_key(project_id, dataset_id, inference_id)})
        return [r.properties["id"] for r in records]
