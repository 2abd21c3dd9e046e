"""Queued algorithm execution over the graph store.

One worker drains a FIFO queue. Each job runs as init → read (its own
read transaction) → compute (no storage) → write (its own write
transaction); the success status is flipped inside the write transaction,
so a result is retrievable exactly when its job reports success. Failures
of any phase mark the job failed without committing the write.

Jobs are persisted as nodes, so the queue survives restarts: anything
still queued or running at startup is re-queued in submission order. The
read/write transactions of a job are tagged ``job:<id>:read`` and
``job:<id>:write``; the engine's own bookkeeping commits under the tag
``engine``, which keeps the two kinds distinguishable in the store's
transaction journal.
"""

from __future__ import annotations

import json
import logging
import threading
import uuid
from collections import deque
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Any, Mapping

from phylograph.domain.repositories import DatasetRepository, scope_key
from phylograph.graphstore import GraphStore, Transaction
from phylograph.inference.storage import InferenceResultRepository

from .registry import (
    AlgorithmRegistry,
    InvalidContextError,
    JobContext,
    KIND_INFERENCE,
    ResultBusyError,
    UnknownJobError,
)

log = logging.getLogger(__name__)

JOB = "Job"

QUEUED = "queued"
RUNNING = "running"
SUCCEEDED = "succeeded"
FAILED = "failed"


@dataclass(frozen=True, slots=True)
class Job:
    id: str
    algorithm: str
    project: str
    dataset: str
    result_id: str
    inference: str | None
    parameters: Mapping[str, Any]
    status: str
    error: str | None = None
    submitted: str | None = None
    started: str | None = None
    finished: str | None = None


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


class JobEngine:
    def __init__(self, store: GraphStore, registry: AlgorithmRegistry):
        self.store = store
        self.registry = registry
        self._datasets = DatasetRepository(store)
        self._inferences = InferenceResultRepository(store)
        self._lock = threading.Lock()
        self._queue: deque[str] = deque()
        self._busy: set[str] = set()
        self._wake = threading.Event()
        store.ensure_node_index(JOB, "key")
        self._recover()

    # -- submission -----------------------------------------------------

    def submit(self, algorithm: str, context: JobContext,
               parameters: Mapping[str, Any] | None = None) -> Job:
        descriptor, _ = self.registry.get(algorithm)
        params = self.registry.validate_parameters(descriptor, parameters)

        result_id = context.result_id or uuid.uuid4().hex[:12]
        context = JobContext(context.project, context.dataset, result_id,
                             context.inference)
        with self._lock:
            with self.store.begin("write", tag="engine") as tx:
                self._check_context(tx, descriptor.kind, context)
                busy_key = self._busy_key(context)
                if busy_key in self._busy:
                    raise ResultBusyError(
                        f"a job for result {result_id!r} is already queued "
                        "or running")
                job_id = uuid.uuid4().hex
                self.store.create_node(tx, {JOB}, {
                    "key": job_id,
                    "id": job_id,
                    "algorithm": descriptor.name,
                    "project": context.project,
                    "dataset": context.dataset,
                    "inference": context.inference or "",
                    "result": result_id,
                    "parameters": json.dumps(params, sort_keys=True),
                    "status": QUEUED,
                    "error": "",
                    "submitted": _now(),
                    "started": "",
                    "finished": "",
                })
                tx.commit()
            self._queue.append(job_id)
            self._busy.add(busy_key)
        self._wake.set()
        return self.get(job_id)

    def _check_context(self, tx: Transaction, kind: str,
                       context: JobContext) -> None:
        if self._datasets.get(tx, context.project, context.dataset) is None:
            raise InvalidContextError(
                f"dataset {context.dataset!r} does not exist in project "
                f"{context.project!r}")
        if kind == KIND_INFERENCE:
            return
        if not context.inference or self._inferences.fetch(
                tx, context.project, context.dataset,
                context.inference) is None:
            raise InvalidContextError(
                f"inference {context.inference!r} does not exist in dataset "
                f"{context.dataset!r}")

    def _busy_key(self, context: JobContext) -> str:
        parts = [context.project, context.dataset]
        if context.inference:
            parts.append(context.inference)
        parts.append(context.result_id)
        return scope_key(*parts)

    # -- execution --------------------------------------------------------

    def run_next(self) -> str | None:
        """Execute the oldest queued job; None when the queue is empty."""
        with self._lock:
            if not self._queue:
                return None
            job_id = self._queue.popleft()
        job = self.get(job_id)
        context = JobContext(job.project, job.dataset, job.result_id,
                             job.inference)
        self._set_status(job_id, status=RUNNING, started=_now())
        try:
            _, factory = self.registry.get(job.algorithm)
            algorithm = factory()
            algorithm.init(context, job.parameters)
            tx1 = self.store.begin("read", tag=f"job:{job_id}:read")
            try:
                data = algorithm.read(tx1)
            finally:
                tx1.close()
            output = algorithm.compute(data)
            with self.store.begin("write", tag=f"job:{job_id}:write") as tx2:
                algorithm.write(tx2, output)
                self._stamp(tx2, job_id, status=SUCCEEDED, finished=_now())
                tx2.commit()
        except Exception as exc:
            log.warning("job %s failed: %s", job_id, exc)
            self._set_status(job_id, status=FAILED, error=str(exc) or
                             type(exc).__name__, finished=_now())
        finally:
            with self._lock:
                self._busy.discard(self._busy_key(context))
        return job_id

    def run_forever(self, stop: threading.Event,
                    poll_interval: float = 0.05) -> None:
        """Worker loop: drain the queue, then doze until woken or polled."""
        while not stop.is_set():
            if self.run_next() is None:
                self._wake.wait(poll_interval)
                self._wake.clear()

    # -- inspection -------------------------------------------------------

    def get(self, job_id: str) -> Job:
        rtx = self.store.begin("read")
        try:
            record = self._node(rtx, job_id)
        finally:
            rtx.close()
        if record is None:
            raise UnknownJobError(f"unknown job {job_id!r}")
        p = record.properties
        return Job(
            id=p["id"],
            algorithm=p["algorithm"],
            project=p["project"],
            dataset=p["dataset"],
            result_id=p["result"],
            inference=p["inference"] or None,
            parameters=json.loads(p["parameters"]),
            status=p["status"],
            error=p["error"] or None,
            submitted=p["submitted"] or None,
            started=p["started"] or None,
            finished=p["finished"] or None,
        )

    def pending(self) -> int:
        with self._lock:
            return len(self._queue)

    # -- internals ----------------------------------------------------

    def _node(self, tx: Transaction, job_id: str):
        hits = self.store.match_nodes(tx, JOB, {"key": job_id})
        return hits[0] if hits else None

    def _set_status(self, job_id: str, **fields: str) -> None:
        with self.store.begin("write", tag="engine") as tx:
            self._stamp(tx, job_id, **fields)
            tx.commit()

    def _stamp(self, tx: Transaction, job_id: str, **fields: str) -> None:
        record = self._node(tx, job_id)
        props = dict(record.properties)
        props.update(fields)
        self.store.update_node(tx, record.id, props)

    def _recover(self) -> None:
        """Re-queue whatever did not finish before the last shutdown."""
        requeue: list[str] = []
        rtx = self.store.begin("read")
        try:
            for record in self.store.match_nodes(rtx, JOB):
                if record.properties["status"] in (QUEUED, RUNNING):
                    requeue.append(record.properties["id"])
        finally:
            rtx.close()
        for job_id in requeue:
            job = self.get(job_id)
            if job.status == RUNNING:
                self._set_status(job_id, status=QUEUED, started="")
            context = JobContext(job.project, job.dataset, job.result_id,
                                 job.inference)
            self._queue.append(job_id)
            self._busy.add(self._busy_key(context))
        if requeue:
            log.info("re-queued %d unfinished job(s)", len(requeue))
