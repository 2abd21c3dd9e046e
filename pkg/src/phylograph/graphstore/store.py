"""Embedded property-graph store with snapshot reads and one serialized writer.

The store keeps nodes and typed edges in memory, backed by an append-only
JSONL log on disk. Every committed transaction is one log line, fsynced
before it is applied, so the on-disk state is always a prefix of committed
history and a restart replays it exactly.

Concurrency model: any number of read transactions may run at once; write
transactions hold an exclusive slot from begin to commit/rollback. Readers
never block on the writer -- each record id maps to a chain of
(commit_timestamp, record) entries and a reader resolves the newest entry
at or before its snapshot. Uncommitted changes live only in the writing
transaction's overlay.

Intended for a single process; there is no cross-process file locking.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Iterator

Scalar = str | int | float | bool

LOG_FILENAME = "graph.log"

#: property name carrying the soft-delete flag on any node
DEPRECATED = "deprecated"


class StoreError(Exception):
    """Base class for storage failures."""


class StoreClosedError(StoreError):
    pass


class TransactionClosedError(StoreError):
    pass


class ReadOnlyTransactionError(StoreError):
    pass


class EmptyLabelsError(StoreError):
    pass


class DanglingEdgeError(StoreError):
    pass


class UnknownNodeError(StoreError):
    pass


class UnknownEdgeError(StoreError):
    pass


class UnknownVersionError(StoreError):
    pass


class DeprecatedEntityError(StoreError):
    pass


@dataclass(frozen=True, slots=True)
class NodeRecord:
    id: int
    labels: frozenset[str]
    properties: dict[str, Scalar]


@dataclass(frozen=True, slots=True)
class EdgeRecord:
    id: int
    kind: str
    source: int
    target: int
    properties: dict[str, Scalar]


@dataclass(frozen=True, slots=True)
class Page:
    """0-based page index plus items per page."""

    offset: int = 0
    limit: int = 20

    def __post_init__(self) -> None:
        if self.offset < 0:
            raise ValueError("page offset must be >= 0")
        if self.limit < 1:
            raise ValueError("page limit must be >= 1")


@dataclass(slots=True)
class TransactionStats:
    """Journal entry kept per begun transaction, for instrumentation."""

    mode: str
    tag: str | None
    committed: bool = False
    ops: int = 0


def _validate_properties(properties: dict[str, Scalar] | None) -> dict[str, Scalar]:
    props = dict(properties or {})
    for key, value in props.items():
        if not isinstance(key, str):
            raise TypeError(f"property key must be str, got {type(key).__name__}")
        if not isinstance(value, (str, int, float, bool)):
            raise TypeError(
                f"property {key!r} must be a scalar (str|int|float|bool), "
                f"got {type(value).__name__}"
            )
    return props


class Transaction:
    """Handle for one unit of work; obtain via :meth:`GraphStore.begin`.

    Read transactions see the last committed state at begin time. A write
    transaction additionally sees its own staged changes, which become
    visible to others only after commit().
    """

    def __init__(self, store: "GraphStore", mode: str, snapshot: int,
                 stats: TransactionStats) -> None:
        self._store = store
        self.mode = mode
        self.snapshot = snapshot
        self._stats = stats
        self._closed = False
        # staged changes (write mode only)
        self._nodes: dict[int, NodeRecord] = {}
        self._edges: dict[int, EdgeRecord | None] = {}  # None = deletion
        self._label_ids: dict[str, list[int]] = {}
        self._out: dict[int, list[int]] = {}
        self._in: dict[int, list[int]] = {}
        self._created_nodes: set[int] = set()
        self._ops: list[list[Any]] = []

    @property
    def store(self) -> "GraphStore":
        return self._store

    @property
    def closed(self) -> bool:
        return self._closed

    def commit(self) -> None:
        if self._closed:
            raise TransactionClosedError("transaction already closed")
        self._closed = True
        if self.mode == "write":
            self._store._commit(self)

    def rollback(self) -> None:
        if self._closed:
            raise TransactionClosedError("transaction already closed")
        self._discard()

    def close(self) -> None:
        """Release without committing; staged changes are dropped."""
        if not self._closed:
            self._discard()

    def _discard(self) -> None:
        self._closed = True
        self._nodes.clear()
        self._edges.clear()
        if self.mode == "write":
            self._store._release_writer()

    def __enter__(self) -> "Transaction":
        return self

    def __exit__(self, exc_type, exc, tb) -> None:
        if not self._closed:
            self._discard()


class GraphStore:
    """Open (or create) the store rooted at *path*.

    The directory holds a single append-only log; it is replayed into
    memory on open. ``fsync=False`` trades durability for speed and is
    meant for throwaway stores.
    """

    def __init__(self, path: str | os.PathLike[str], *, fsync: bool = True) -> None:
        self._dir = Path(path)
        self._dir.mkdir(parents=True, exist_ok=True)
        self._log_path = self._dir / LOG_FILENAME
        self._fsync = fsync
        self._closed = False

        self._writer_slot = threading.Lock()
        self._last_ts = 0
        self._next_id = 1

        # id -> chain of (commit_ts, record-or-None), newest last
        self._node_chains: dict[int, list[tuple[int, NodeRecord | None]]] = {}
        self._edge_chains: dict[int, list[tuple[int, EdgeRecord | None]]] = {}
        # append-only traversal structures
        self._label_ids: dict[str, list[int]] = {}
        self._kind_ids: dict[str, list[int]] = {}
        self._out: dict[int, list[int]] = {}
        self._in: dict[int, list[int]] = {}
        # optional property indexes: (label, key) -> value -> [node ids]
        self._node_indexes: dict[tuple[str, str], dict[Scalar, list[int]]] = {}
        self._edge_indexes: dict[tuple[str, str], dict[Scalar, list[int]]] = {}

        self.journal: list[TransactionStats] = []
        self.mutation_count = 0  # committed ops applied during this process

        self._replay()
        self._log_file = open(self._log_path, "a", encoding="utf-8")

    # -- lifecycle ---------------------------------------------------------

    def close(self) -> None:
        if self._closed:
            return
        with self._writer_slot:
            self._closed = True
            self._log_file.close()

    @property
    def path(self) -> Path:
        return self._dir

    def __enter__(self) -> "GraphStore":
        return self

    def __exit__(self, exc_type, exc, tb) -> None:
        self.close()

    # -- transactions ------------------------------------------------------

    def begin(self, mode: str = "read", tag: str | None = None) -> Transaction:
        if mode not in ("read", "write"):
            raise ValueError(f"unknown transaction mode {mode!r}")
        if self._closed:
            raise StoreClosedError(f"store at {self._dir} is closed")
        if mode == "write":
            self._writer_slot.acquire()
            if self._closed:
                self._writer_slot.release()
                raise StoreClosedError(f"store at {self._dir} is closed")
        stats = TransactionStats(mode=mode, tag=tag)
        self.journal.append(stats)
        return Transaction(self, mode, self._last_ts, stats)

    def _release_writer(self) -> None:
        self._writer_slot.release()

    def _commit(self, tx: Transaction) -> None:
        try:
            if tx._ops:
                ts = self._last_ts + 1
                line = json.dumps({"ts": ts, "hwm": self._next_id, "ops": tx._ops},
                                  separators=(",", ":"))
                self._log_file.write(line + "\n")
                self._log_file.flush()
                if self._fsync:
                    os.fsync(self._log_file.fileno())
                self._apply_ops(tx._ops, ts)
                self._last_ts = ts
                self.mutation_count += len(tx._ops)
            tx._stats.committed = True
            tx._stats.ops = len(tx._ops)
        finally:
            self._writer_slot.release()

    # -- replay / apply ----------------------------------------------------

    def _replay(self) -> None:
        if not self._log_path.exists():
            return
        with open(self._log_path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                entry = json.loads(line)
                self._apply_ops(entry["ops"], entry["ts"])
                self._last_ts = max(self._last_ts, entry["ts"])
                self._next_id = max(self._next_id, entry["hwm"])

    def _apply_ops(self, ops: list[list[Any]], ts: int) -> None:
        """Apply committed ops to the in-memory structures.

        Used identically for live commits and for replay at open, so the
        rebuilt state always matches what the committing process saw.
        """
        for op in ops:
            tag = op[0]
            if tag == "n+":
                _, node_id, labels, props = op
                record = NodeRecord(node_id, frozenset(labels), props)
                self._node_chains[node_id] = [(ts, record)]
                for label in record.labels:
                    self._label_ids.setdefault(label, []).append(node_id)
                self._index_node(record)
                self._next_id = max(self._next_id, node_id + 1)
            elif tag == "n~":
                _, node_id, props = op
                chain = self._node_chains[node_id]
                prev = chain[-1][1]
                record = NodeRecord(node_id, prev.labels, props)
                chain.append((ts, record))
                self._index_node(record, previous=prev)
            elif tag == "e+":
                _, edge_id, kind, source, target, props = op
                record = EdgeRecord(edge_id, kind, source, target, props)
                self._edge_chains[edge_id] = [(ts, record)]
                self._kind_ids.setdefault(kind, []).append(edge_id)
                self._out.setdefault(source, []).append(edge_id)
                self._in.setdefault(target, []).append(edge_id)
                self._index_edge(record)
                self._next_id = max(self._next_id, edge_id + 1)
            elif tag == "e-":
                _, edge_id = op
                self._edge_chains[edge_id].append((ts, None))
            else:
                raise StoreError(f"corrupt log: unknown op {tag!r}")

    def _index_node(self, record: NodeRecord,
                    previous: NodeRecord | None = None) -> None:
        for (label, key), buckets in self._node_indexes.items():
            if label not in record.labels or key not in record.properties:
                continue
            value = record.properties[key]
            if previous is not None and previous.properties.get(key) == value:
                continue  # unchanged; already indexed
            buckets.setdefault(value, []).append(record.id)

    def _index_edge(self, record: EdgeRecord) -> None:
        for (kind, key), buckets in self._edge_indexes.items():
            if record.kind != kind or key not in record.properties:
                continue
            buckets.setdefault(record.properties[key], []).append(record.id)

    # -- indexes -----------------------------------------------------------

    def ensure_node_index(self, label: str, key: str) -> None:
        """Register a point-lookup index over ``(label, property)``.

        Indexed property values are treated as immutable: updating a node
        to a different value for an indexed key is rejected, which keeps
        every index bucket ordered by node id.
        """
        if (label, key) in self._node_indexes:
            return
        buckets: dict[Scalar, list[int]] = {}
        for node_id in self._label_ids.get(label, []):
            record = self._node_chains[node_id][-1][1]
            if record is not None and key in record.properties:
                buckets.setdefault(record.properties[key], []).append(node_id)
        self._node_indexes[(label, key)] = buckets

    def ensure_edge_index(self, kind: str, key: str) -> None:
        if (kind, key) in self._edge_indexes:
            return
        buckets: dict[Scalar, list[int]] = {}
        for edge_id in self._kind_ids.get(kind, []):
            record = self._edge_chains[edge_id][-1][1]
            if record is not None and key in record.properties:
                buckets.setdefault(record.properties[key], []).append(edge_id)
        self._edge_indexes[(kind, key)] = buckets

    # -- write operations --------------------------------------------------

    def _require_write(self, tx: Transaction) -> None:
        if tx._closed:
            raise TransactionClosedError("transaction already closed")
        if tx.mode != "write":
            raise ReadOnlyTransactionError("operation requires a write transaction")

    def create_node(self, tx: Transaction, labels: Iterable[str],
                    properties: dict[str, Scalar] | None = None) -> int:
        self._require_write(tx)
        label_set = frozenset(labels)
        if not label_set:
            raise EmptyLabelsError("a node needs at least one label")
        props = _validate_properties(properties)
        node_id = self._next_id
        self._next_id += 1
        tx._nodes[node_id] = NodeRecord(node_id, label_set, props)
        tx._created_nodes.add(node_id)
        for label in label_set:
            tx._label_ids.setdefault(label, []).append(node_id)
        tx._ops.append(["n+", node_id, sorted(label_set), props])
        return node_id

    def update_node(self, tx: Transaction, node_id: int,
                    properties: dict[str, Scalar]) -> None:
        """Replace a node's property map (labels are fixed at creation)."""
        self._require_write(tx)
        record = self._resolve_node(tx, node_id)
        if record is None:
            raise UnknownNodeError(f"node {node_id} does not exist")
        props = _validate_properties(properties)
        for (label, key) in self._node_indexes:
            if label in record.labels and key in record.properties:
                if props.get(key) != record.properties[key]:
                    raise StoreError(
                        f"indexed property {key!r} on label {label!r} is immutable")
        tx._nodes[node_id] = NodeRecord(node_id, record.labels, props)
        tx._ops.append(["n~", node_id, props])

    def create_edge(self, tx: Transaction, kind: str, source: int, target: int,
                    properties: dict[str, Scalar] | None = None) -> int:
        self._require_write(tx)
        if self._resolve_node(tx, source) is None:
            raise DanglingEdgeError(f"source node {source} does not exist")
        if self._resolve_node(tx, target) is None:
            raise DanglingEdgeError(f"target node {target} does not exist")
        props = _validate_properties(properties)
        edge_id = self._next_id
        self._next_id += 1
        tx._edges[edge_id] = EdgeRecord(edge_id, kind, source, target, props)
        tx._out.setdefault(source, []).append(edge_id)
        tx._in.setdefault(target, []).append(edge_id)
        tx._ops.append(["e+", edge_id, kind, source, target, props])
        return edge_id

    def delete_edge(self, tx: Transaction, edge_id: int) -> None:
        self._require_write(tx)
        if self._resolve_edge(tx, edge_id) is None:
            raise UnknownEdgeError(f"edge {edge_id} does not exist")
        tx._edges[edge_id] = None
        tx._ops.append(["e-", edge_id])

    def soft_delete(self, tx: Transaction, node_id: int) -> None:
        """Flag a node deprecated; history and lookups by id stay intact."""
        self._require_write(tx)
        record = self._resolve_node(tx, node_id)
        if record is None:
            raise UnknownNodeError(f"node {node_id} does not exist")
        if record.properties.get(DEPRECATED):
            raise DeprecatedEntityError(f"node {node_id} is already deprecated")
        props = dict(record.properties)
        props[DEPRECATED] = True
        tx._nodes[node_id] = NodeRecord(node_id, record.labels, props)
        tx._ops.append(["n~", node_id, props])

    def restore(self, tx: Transaction, node_id: int) -> None:
        """Clear the deprecated flag; idempotent."""
        self._require_write(tx)
        record = self._resolve_node(tx, node_id)
        if record is None:
            raise UnknownNodeError(f"node {node_id} does not exist")
        if not record.properties.get(DEPRECATED):
            return
        props = dict(record.properties)
        props[DEPRECATED] = False
        tx._nodes[node_id] = NodeRecord(node_id, record.labels, props)
        tx._ops.append(["n~", node_id, props])

    # -- read operations ----------------------------------------------------

    def _resolve_node(self, tx: Transaction, node_id: int) -> NodeRecord | None:
        if tx._closed:
            raise TransactionClosedError("transaction already closed")
        if node_id in tx._nodes:
            return tx._nodes[node_id]
        chain = self._node_chains.get(node_id)
        if chain is None:
            return None
        for ts, record in reversed(chain):
            if ts <= tx.snapshot:
                return record
        return None

    def _resolve_edge(self, tx: Transaction, edge_id: int) -> EdgeRecord | None:
        if tx._closed:
            raise TransactionClosedError("transaction already closed")
        if edge_id in tx._edges:
            return tx._edges[edge_id]
        chain = self._edge_chains.get(edge_id)
        if chain is None:
            return None
        for ts, record in reversed(chain):
            if ts <= tx.snapshot:
                return record
        return None

    def get_node(self, tx: Transaction, node_id: int) -> NodeRecord | None:
        return self._resolve_node(tx, node_id)

    def get_edge(self, tx: Transaction, edge_id: int) -> EdgeRecord | None:
        return self._resolve_edge(tx, edge_id)

    def out_edges(self, tx: Transaction, node_id: int,
                  kind: str | None = None) -> list[EdgeRecord]:
        return self._adjacent(tx, node_id, kind, self._out, tx._out)

    def in_edges(self, tx: Transaction, node_id: int,
                 kind: str | None = None) -> list[EdgeRecord]:
        return self._adjacent(tx, node_id, kind, self._in, tx._in)

    def _adjacent(self, tx: Transaction, node_id: int, kind: str | None,
                  committed: dict[int, list[int]],
                  staged: dict[int, list[int]]) -> list[EdgeRecord]:
        result = []
        for edge_id in self._iter_committed(committed.get(node_id)):
            record = self._resolve_edge(tx, edge_id)
            if record is not None and (kind is None or record.kind == kind):
                result.append(record)
        for edge_id in staged.get(node_id, []):
            record = tx._edges.get(edge_id)
            if record is not None and (kind is None or record.kind == kind):
                result.append(record)
        return result

    @staticmethod
    def _iter_committed(ids: list[int] | None) -> Iterator[int]:
        # index-based iteration tolerates concurrent appends by the writer
        if ids is None:
            return
        for i in range(len(ids)):
            yield ids[i]

    def _candidate_node_ids(self, tx: Transaction, label: str,
                            filters: dict[str, Scalar] | None) -> Iterator[int]:
        committed: list[int] | None = None
        if filters:
            for key in filters:
                buckets = self._node_indexes.get((label, key))
                if buckets is not None:
                    committed = buckets.get(filters[key], [])
                    break
        if committed is None:
            committed = self._label_ids.get(label, [])
        yield from self._iter_committed(committed)
        # staged creations have fresh ids, so they sort after all committed
        # ones and cannot duplicate them
        yield from tx._label_ids.get(label, [])

    def match_nodes(self, tx: Transaction, label: str,
                    filters: dict[str, Scalar] | None = None,
                    page: Page | None = None,
                    include_deprecated: bool = False) -> list[NodeRecord]:
        """Nodes carrying *label* and all *filters*, in ascending id order.

        With a page, skips ``offset * limit`` matches and returns at most
        ``limit``. Deprecated nodes are excluded unless asked for.
        """
        skip = page.offset * page.limit if page else 0
        out: list[NodeRecord] = []
        for record in self._scan_nodes(tx, label, filters, include_deprecated):
            if skip > 0:
                skip -= 1
                continue
            out.append(record)
            if page is not None and len(out) >= page.limit:
                break
        return out

    def count_nodes(self, tx: Transaction, label: str,
                    filters: dict[str, Scalar] | None = None,
                    include_deprecated: bool = False) -> int:
        return sum(1 for _ in self._scan_nodes(tx, label, filters, include_deprecated))

    def _scan_nodes(self, tx: Transaction, label: str,
                    filters: dict[str, Scalar] | None,
                    include_deprecated: bool) -> Iterator[NodeRecord]:
        for node_id in self._candidate_node_ids(tx, label, filters):
            record = self._resolve_node(tx, node_id)
            if record is None or label not in record.labels:
                continue
            if not include_deprecated and record.properties.get(DEPRECATED):
                continue
            if filters and any(record.properties.get(k) != v
                               for k, v in filters.items()):
                continue
            yield record

    def match_edges(self, tx: Transaction, kind: str,
                    filters: dict[str, Scalar] | None = None) -> list[EdgeRecord]:
        """Edges of *kind* matching all *filters*, in ascending id order."""
        committed: list[int] | None = None
        if filters:
            for key in filters:
                buckets = self._edge_indexes.get((kind, key))
                if buckets is not None:
                    committed = buckets.get(filters[key], [])
                    break
        if committed is None:
            committed = self._kind_ids.get(kind, [])
        out: list[EdgeRecord] = []
        for edge_id in self._iter_committed(committed):
            record = self._resolve_edge(tx, edge_id)
            if record is None or record.kind != kind:
                continue
            if filters and any(record.properties.get(k) != v
                               for k, v in filters.items()):
                continue
            out.append(record)
        # staged non-tombstone records are always new edges with fresh ids
        for edge_id in sorted(tx._edges):
            record = tx._edges[edge_id]
            if record is None or record.kind != kind:
                continue
            if filters and any(record.properties.get(k) != v
                               for k, v in filters.items()):
                continue
            out.append(record)
        return out
