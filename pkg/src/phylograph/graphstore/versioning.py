"""Entity/state versioning over the graph store.

An entity is an identity node that carries its stable business key, the
soft-delete flag and the current version number. Every mutation creates a
fresh immutable state node, linked to the identity by a ``HAS_STATE`` edge
numbered 1..n with no gaps. Old states are never touched, so any version
stays readable after later writes and after soft deletion.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .store import (
    DEPRECATED,
    DeprecatedEntityError,
    Scalar,
    Transaction,
    UnknownNodeError,
    UnknownVersionError,
)

VERSION_EDGE = "HAS_STATE"
STATE_LABEL = "State"
CURRENT_VERSION = "current_version"


@dataclass(frozen=True, slots=True)
class EntityState:
    """One readable state of a versioned entity plus its metadata."""

    entity_id: int
    version: int
    properties: dict[str, Scalar]
    deprecated: bool
    current_version: int


def create_versioned(tx: Transaction, labels: Iterable[str],
                     identity_properties: dict[str, Scalar],
                     state_properties: dict[str, Scalar]) -> int:
    """Create an entity at version 1 and return its identity node id."""
    store = tx.store
    props = dict(identity_properties)
    props[CURRENT_VERSION] = 1
    props.setdefault(DEPRECATED, False)
    entity_id = store.create_node(tx, labels, props)
    _append_state(tx, entity_id, 1, state_properties)
    return entity_id


def put_versioned(tx: Transaction, entity_id: int,
                  state_properties: dict[str, Scalar]) -> int:
    """Write the next state of an existing entity; returns its version."""
    store = tx.store
    record = store.get_node(tx, entity_id)
    if record is None:
        raise UnknownNodeError(f"entity {entity_id} does not exist")
    if record.properties.get(DEPRECATED):
        raise DeprecatedEntityError(
            f"entity {entity_id} is deprecated; restore it before writing")
    version = int(record.properties[CURRENT_VERSION]) + 1
    _append_state(tx, entity_id, version, state_properties)
    props = dict(record.properties)
    props[CURRENT_VERSION] = version
    store.update_node(tx, entity_id, props)
    return version


def get_versioned(tx: Transaction, entity_id: int,
                  version: int | None = None) -> EntityState:
    """Read one state; current when *version* is omitted."""
    store = tx.store
    record = store.get_node(tx, entity_id)
    if record is None:
        raise UnknownNodeError(f"entity {entity_id} does not exist")
    current = int(record.properties[CURRENT_VERSION])
    want = current if version is None else version
    if want < 1 or want > current:
        raise UnknownVersionError(
            f"entity {entity_id} has versions 1..{current}, not {want}")
    for edge in store.out_edges(tx, entity_id, VERSION_EDGE):
        if edge.properties.get("version") == want:
            state = store.get_node(tx, edge.target)
            assert state is not None
            return EntityState(
                entity_id=entity_id,
                version=want,
                properties=dict(state.properties),
                deprecated=bool(record.properties.get(DEPRECATED)),
                current_version=current,
            )
    raise UnknownVersionError(f"entity {entity_id} is missing state {want}")


def _append_state(tx: Transaction, entity_id: int, version: int,
                  state_properties: dict[str, Scalar]) -> None:
    store = tx.store
    state_id = store.create_node(tx, {STATE_LABEL}, state_properties)
    store.create_edge(tx, VERSION_EDGE, entity_id, state_id, {"version": version})
