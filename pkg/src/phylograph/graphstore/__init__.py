"""Embedded versioned property-graph storage engine."""

from .store import (
    DEPRECATED,
    DanglingEdgeError,
    DeprecatedEntityError,
    EdgeRecord,
    EmptyLabelsError,
    GraphStore,
    NodeRecord,
    Page,
    ReadOnlyTransactionError,
    Scalar,
    StoreClosedError,
    StoreError,
    Transaction,
    TransactionClosedError,
    UnknownEdgeError,
    UnknownNodeError,
    UnknownVersionError,
)
from .versioning import (
    CURRENT_VERSION,
    STATE_LABEL,
    VERSION_EDGE,
    EntityState,
    create_versioned,
    get_versioned,
    put_versioned,
)

__all__ = [
    "DEPRECATED",
    "CURRENT_VERSION",
    "STATE_LABEL",
    "VERSION_EDGE",
    "DanglingEdgeError",
    "DeprecatedEntityError",
    "EdgeRecord",
    "EmptyLabelsError",
    "EntityState",
    "GraphStore",
    "NodeRecord",
    "Page",
    "ReadOnlyTransactionError",
    "Scalar",
    "StoreClosedError",
    "StoreError",
    "Transaction",
    "TransactionClosedError",
    "UnknownEdgeError",
    "UnknownNodeError",
    "UnknownVersionError",
    "create_versioned",
    "get_versioned",
    "put_versioned",
]
