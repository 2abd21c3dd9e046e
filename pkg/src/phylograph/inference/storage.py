"""Persistence of inference results as labeled edge layers.

Each edge of a result becomes one DISTANCES edge between the two profile
nodes, carrying the (dataset-scoped) inference id and the distance. Layers
with different ids coexist on the same profiles; re-persisting an id drops
the old layer and writes the new one in the same transaction.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from phylograph.domain.errors import UnknownProfileError
from phylograph.domain.repositories import PROFILE, check_id, scope_key
from phylograph.graphstore import GraphStore, Transaction

from .goeburst import Edge

DISTANCES = "DISTANCES"
INFERENCE = "Inference"


@dataclass(frozen=True, slots=True)
class InferenceResult:
    id: str
    algorithm: str
    dataset: str
    edges: tuple[Edge, ...]
    parameters: Mapping[str, object] = field(default_factory=dict)
    founder: str | None = None
    profiles: tuple[str, ...] = ()


class InferenceResultRepository:
    def __init__(self, store: GraphStore):
        self.store = store
        store.ensure_node_index(INFERENCE, "key")
        store.ensure_edge_index(DISTANCES, "inference")

    def persist(self, tx: Transaction, project_id: str, dataset_id: str,
                inference_id: str, edges: Sequence[Edge], *,
                algorithm: str = "", parameters: Mapping[str, object] | None = None,
                founder: str | None = None,
                profiles: Sequence[str] | None = None) -> None:
        check_id(inference_id, "inference id")
        key = scope_key(project_id, dataset_id, inference_id)
        for old in self.store.match_edges(tx, DISTANCES, {"inference": key}):
            self.store.delete_edge(tx, old.id)

        node_ids: dict[str, int] = {}

        def endpoint(profile_id: str) -> int:
            if profile_id not in node_ids:
                hits = self.store.match_nodes(
                    tx, PROFILE,
                    {"key": scope_key(project_id, dataset_id, profile_id)},
                    include_deprecated=True)
                if not hits:
                    raise UnknownProfileError(
                        f"profile {profile_id!r} does not exist in dataset "
                        f"{dataset_id!r}")
                node_ids[profile_id] = hits[0].id
            return node_ids[profile_id]

        for a, b, distance in edges:
            if a == b:
                raise ValueError(f"self-loop on profile {a!r}")
            self.store.create_edge(tx, DISTANCES, endpoint(a), endpoint(b),
                                   {"inference": key, "distance": distance})

        if profiles is None:
            # fall back to the edge endpoints as the covered node set
            profiles = sorted({p for a, b, _ in edges for p in (a, b)})
        meta = {
            "key": key,
            "id": inference_id,
            "dataset": scope_key(project_id, dataset_id),
            "algorithm": algorithm,
            "parameters": json.dumps(dict(parameters or {}), sort_keys=True),
            "founder": founder or "",
            "edge_count": len(edges),
            "profiles": json.dumps(list(profiles)),
        }
        existing = self.store.match_nodes(tx, INFERENCE, {"key": key},
                                          include_deprecated=True)
        if existing:
            self.store.update_node(tx, existing[0].id, meta)
        else:
            self.store.create_node(tx, {INFERENCE}, meta)

    def edges(self, tx: Transaction, project_id: str, dataset_id: str,
              inference_id: str) -> list[Edge]:
        """The layer's edge list, empty for an unknown inference id."""
        key = scope_key(project_id, dataset_id, inference_id)
        out: list[Edge] = []
        for edge in self.store.match_edges(tx, DISTANCES, {"inference": key}):
            src = self.store.get_node(tx, edge.source)
            dst = self.store.get_node(tx, edge.target)
            out.append((src.properties["id"], dst.properties["id"],
                        edge.properties["distance"]))
        return out

    def fetch(self, tx: Transaction, project_id: str, dataset_id: str,
              inference_id: str) -> InferenceResult | None:
        key = scope_key(project_id, dataset_id, inference_id)
        hits = self.store.match_nodes(tx, INFERENCE, {"key": key})
        if not hits:
            return None
        meta = hits[0].properties
        return InferenceResult(
            id=inference_id,
            algorithm=meta["algorithm"],
            dataset=dataset_id,
            edges=tuple(self.edges(tx, project_id, dataset_id, inference_id)),
            parameters=json.loads(meta["parameters"]),
            founder=meta["founder"] or None,
            profiles=tuple(json.loads(meta["profiles"])),
        )

    def list_ids(self, tx: Transaction, project_id: str,
                 dataset_id: str) -> list[str]:
        records = self.store.match_nodes(
            tx, INFERENCE, {"dataset": scope_key(project_id, dataset_id)})
        return [r.properties["id"] for r in records]
