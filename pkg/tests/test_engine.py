"""Job engine: registry resolution, queueing, phase discipline, recovery."""

import threading
import time

import pytest

from phylograph.domain import (
    AllelicProfile,
    Dataset,
    DatasetRepository,
    Project,
    ProjectRepository,
    ProfileRepository,
    Schema,
    SchemaRepository,
)
from phylograph.engine import (
    Algorithm,
    AlgorithmDescriptor,
    AlgorithmRegistry,
    DuplicateAlgorithmError,
    FAILED,
    InvalidContextError,
    JobContext,
    JobEngine,
    KIND_INFERENCE,
    KIND_VISUALIZATION,
    Parameter,
    ParameterValidationError,
    QUEUED,
    ResultBusyError,
    RUNNING,
    SUCCEEDED,
    UnknownAlgorithmError,
    UnknownJobError,
    default_registry,
)
from phylograph.graphstore import GraphStore
from phylograph.inference import GoeBurstAlgorithm, InferenceResultRepository
from phylograph.viz import VisualizationRepository

GOEBURST = "algorithms.inference.goeburst"
RADIAL = "algorithms.visualization.radial"

LOCI = tuple(f"l{i}" for i in range(7))
CHAIN = (
    ("p1", ("1", "1", "1", "1", "1", "1", "1")),
    ("p2", ("1", "1", "1", "1", "1", "1", "2")),
    ("p3", ("1", "1", "1", "1", "1", "2", "2")),
)
CHAIN_EDGES = [("p1", "p2", 1), ("p2", "p3", 1)]


def make_store(tmp_path, name="store"):
    return GraphStore(tmp_path / name, fsync=False)


def seed_world(store, profiles=CHAIN):
    projects = ProjectRepository(store)
    schemas = SchemaRepository(store)
    datasets = DatasetRepository(store)
    repo = ProfileRepository(store)
    with store.begin(mode="write") as tx:
        projects.save(tx, Project(id="p"))
        schemas.save(tx, Schema(id="s", taxon="t", loci=LOCI))
        datasets.save(tx, Dataset(id="d", project="p", schema="s"))
        for pid, alleles in profiles:
            repo.save(tx, "p", "d", AllelicProfile(id=pid, alleles=alleles))
        tx.commit()


class TestRegistry:
    def test_register_and_list(self):
        registry = AlgorithmRegistry()
        descriptor = AlgorithmDescriptor("acme.inference.thing",
                                         KIND_INFERENCE)
        registry.register(descriptor, lambda: None)
        assert registry.names() == ["acme.inference.thing"]

    def test_duplicate_name_refused(self):
        registry = AlgorithmRegistry()
        descriptor = AlgorithmDescriptor("acme.inference.thing",
                                         KIND_INFERENCE)
        registry.register(descriptor, lambda: None)
        with pytest.raises(DuplicateAlgorithmError):
            registry.register(descriptor, lambda: None)

    def test_default_registry_holds_exactly_the_builtins(self, tmp_path):
        store = make_store(tmp_path)
        try:
            assert default_registry(store).names() == [GOEBURST, RADIAL]
        finally:
            store.close()

    def test_resolve_accepts_unambiguous_suffix(self, tmp_path):
        store = make_store(tmp_path)
        try:
            registry = default_registry(store)
            assert registry.resolve("goeburst") == GOEBURST
            assert registry.resolve("radial") == RADIAL
            assert registry.resolve(GOEBURST) == GOEBURST
            with pytest.raises(UnknownAlgorithmError):
                registry.resolve("nope")
        finally:
            store.close()

    def test_resolve_refuses_ambiguous_suffix(self):
        registry = AlgorithmRegistry()
        for name in ("a.x.same", "b.y.same"):
            registry.register(AlgorithmDescriptor(name, KIND_INFERENCE),
                              lambda: None)
        with pytest.raises(UnknownAlgorithmError):
            registry.resolve("same")
        assert registry.resolve("a.x.same") == "a.x.same"

    def test_parameter_validation(self):
        registry = AlgorithmRegistry()
        descriptor = AlgorithmDescriptor(
            "acme.inference.thing", KIND_INFERENCE,
            (Parameter("lvs", int, required=False, default=3),
             Parameter("label", str)))
        ok = registry.validate_parameters(descriptor,
                                          {"lvs": 2, "label": "x"})
        assert ok == {"lvs": 2, "label": "x"}
        assert registry.validate_parameters(
            descriptor, {"label": "x"}) == {"lvs": 3, "label": "x"}
        with pytest.raises(ParameterValidationError):  # wrong type
            registry.validate_parameters(descriptor,
                                         {"lvs": "x", "label": "x"})
        with pytest.raises(ParameterValidationError):  # bool is not an int
            registry.validate_parameters(descriptor,
                                         {"lvs": True, "label": "x"})
        with pytest.raises(ParameterValidationError):  # unknown name
            registry.validate_parameters(descriptor,
                                         {"label": "x", "zap": 1})
        with pytest.raises(ParameterValidationError):  # missing required
            registry.validate_parameters(descriptor, {"lvs": 2})

    def test_descriptor_kind_is_checked(self):
        with pytest.raises(ValueError):
            AlgorithmDescriptor("acme.thing", "sorting")


@pytest.fixture()
def world(tmp_path):
    store = make_store(tmp_path)
    seed_world(store)
    engine = JobEngine(store, default_registry(store))
    yield store, engine
    store.close()


class TestSubmit:
    def test_job_starts_queued_with_defaults_applied(self, world):
        store, engine = world
        job = engine.submit("goeburst", JobContext("p", "d", "inf1"))
        assert job.status == QUEUED
        assert job.algorithm == GOEBURST
        assert job.parameters == {"lvs": 3}
        assert job.result_id == "inf1"
        assert job.submitted is not None
        assert engine.get(job.id).status == QUEUED
        assert engine.pending() == 1

    def test_result_id_allocated_when_absent(self, world):
        _, engine = world
        job = engine.submit("goeburst", JobContext("p", "d", ""))
        assert len(job.result_id) == 12
        other = engine.submit("goeburst", JobContext("p", "d", ""))
        assert other.result_id != job.result_id

    def test_unknown_dataset_refused(self, world):
        _, engine = world
        with pytest.raises(InvalidContextError):
            engine.submit("goeburst", JobContext("p", "ghost", "inf1"))
        assert engine.pending() == 0

    def test_visualization_requires_existing_inference(self, world):
        _, engine = world
        with pytest.raises(InvalidContextError):
            engine.submit("radial",
                          JobContext("p", "d", "v1", inference="ghost"))

    def test_same_result_id_is_busy_until_run(self, world):
        _, engine = world
        engine.submit("goeburst", JobContext("p", "d", "inf1"))
        with pytest.raises(ResultBusyError):
            engine.submit("goeburst", JobContext("p", "d", "inf1"))
        engine.submit("goeburst", JobContext("p", "d", "inf2"))  # distinct ok
        engine.run_next()
        engine.run_next()
        # finished → the id is free again for recomputation
        job = engine.submit("goeburst", JobContext("p", "d", "inf1"))
        assert job.status == QUEUED

    def test_bad_parameters_never_enqueue(self, world):
        _, engine = world
        with pytest.raises(ParameterValidationError):
            engine.submit("goeburst", JobContext("p", "d", "inf1"),
                          {"lvs": "three"})
        with pytest.raises(UnknownAlgorithmError):
            engine.submit("nope", JobContext("p", "d", "inf1"))
        assert engine.pending() == 0

    def test_unknown_job_lookup(self, world):
        _, engine = world
        with pytest.raises(UnknownJobError):
            engine.get("nope")


class TestRunNext:
    def test_empty_queue_returns_none(self, world):
        _, engine = world
        assert engine.run_next() is None

    def test_fifo_order(self, world):
        _, engine = world
        first = engine.submit("goeburst", JobContext("p", "d", "inf1"))
        second = engine.submit("goeburst", JobContext("p", "d", "inf2"))
        assert engine.run_next() == first.id
        assert engine.run_next() == second.id
        assert engine.run_next() is None

    def test_success_persists_edges_and_founder(self, world):
        store, engine = world
        job = engine.submit("goeburst", JobContext("p", "d", "inf1"))
        engine.run_next()
        done = engine.get(job.id)
        assert done.status == SUCCEEDED
        assert done.finished is not None
        assert done.error is None
        results = InferenceResultRepository(store)
        with store.begin() as tx:
            result = results.fetch(tx, "p", "d", "inf1")
        assert sorted(result.edges) == CHAIN_EDGES
        assert result.founder == "p2"  # middle of the chain, highest c₁
        assert result.algorithm == GOEBURST
        assert result.parameters == {"lvs": 3}

    def test_visualization_covers_the_inferred_profiles(self, world):
        store, engine = world
        engine.submit("goeburst", JobContext("p", "d", "inf1"))
        engine.run_next()
        job = engine.submit("radial",
                            JobContext("p", "d", "v1", inference="inf1"))
        engine.run_next()
        assert engine.get(job.id).status == SUCCEEDED
        with store.begin() as tx:
            layout = VisualizationRepository(store).fetch(tx, "p", "d",
                                                          "inf1", "v1")
        assert layout.algorithm == RADIAL
        assert {pid for pid, _, _ in layout.coordinates} == {"p1", "p2",
                                                             "p3"}
        # founder is the root, pinned at the origin
        coords = {pid: (x, y) for pid, x, y in layout.coordinates}
        assert coords["p2"] == (0.0, 0.0)

    def test_two_transaction_discipline(self, world):
        store, engine = world
        job = engine.submit("goeburst", JobContext("p", "d", "inf1"))
        engine.run_next()
        reads = [s for s in store.journal if s.tag == f"job:{job.id}:read"]
        writes = [s for s in store.journal if s.tag == f"job:{job.id}:write"]
        assert len(reads) == 1 and reads[0].mode == "read"
        assert len(writes) == 1 and writes[0].mode == "write"
        assert writes[0].committed and writes[0].ops > 0

    def test_compute_failure_marks_failed_and_writes_nothing(self, world):
        store, engine = world
        register_hooked(engine.registry, store, compute_boom=True)
        job = engine.submit("test.inference.hooked",
                            JobContext("p", "d", "inf1"))
        assert engine.run_next() == job.id
        failed = engine.get(job.id)
        assert failed.status == FAILED
        assert "boom" in failed.error
        assert not [s for s in store.journal
                    if s.tag == f"job:{job.id}:write"]
        with store.begin() as tx:
            results = InferenceResultRepository(store)
            assert results.edges(tx, "p", "d", "inf1") == []
        # the failed run released its claim on the result id
        engine.submit("goeburst", JobContext("p", "d", "inf1"))

    def test_write_failure_rolls_back(self, world):
        store, engine = world
        register_hooked(engine.registry, store, write_boom=True)
        job = engine.submit("test.inference.hooked",
                            JobContext("p", "d", "inf1"))
        engine.run_next()
        assert engine.get(job.id).status == FAILED
        writes = [s for s in store.journal if s.tag == f"job:{job.id}:write"]
        assert len(writes) == 1 and not writes[0].committed
        with store.begin() as tx:
            assert InferenceResultRepository(store).edges(
                tx, "p", "d", "inf1") == []

    def test_result_resolvable_exactly_when_succeeded(self, world):
        store, engine = world
        register_hooked(engine.registry, store, compute_boom=True)
        engine.submit("goeburst", JobContext("p", "d", "good"))
        engine.submit("test.inference.hooked", JobContext("p", "d", "bad"))
        ids = [engine.run_next(), engine.run_next()]
        results = InferenceResultRepository(store)
        for job_id in ids:
            job = engine.get(job_id)
            with store.begin() as tx:
                found = results.fetch(tx, "p", "d", job.result_id)
            assert (found is not None) == (job.status == SUCCEEDED)

    def test_compute_ignores_writes_after_its_read(self, world):
        """A profile inserted between the read and write phases must not
        leak into the output: the job works entirely off its read snapshot."""
        store, engine = world

        class Sneaky(GoeBurstAlgorithm):
            def compute(self, data):
                seed_extra(store)
                return super().compute(data)

        engine.registry.register(
            AlgorithmDescriptor("test.inference.sneaky", KIND_INFERENCE,
                                (Parameter("lvs", int, required=False,
                                           default=3),)),
            lambda: Sneaky(store))
        job = engine.submit("test.inference.sneaky",
                            JobContext("p", "d", "inf1"))
        engine.run_next()
        assert engine.get(job.id).status == SUCCEEDED
        with store.begin() as tx:
            result = InferenceResultRepository(store).fetch(tx, "p", "d",
                                                            "inf1")
            # p4 is now visible to fresh reads …
            assert ProfileRepository(store).get(tx, "p", "d", "p4")
        # … but the tree spans only what the job's snapshot contained
        assert result.profiles == ("p1", "p2", "p3")
        assert sorted(result.edges) == CHAIN_EDGES


def seed_extra(store):
    with store.begin(mode="write") as tx:
        ProfileRepository(store).save(
            tx, "p", "d",
            AllelicProfile(id="p4", alleles=("9",) * 7))
        tx.commit()


def register_hooked(registry, store, compute_boom=False, write_boom=False):
    class Hooked(GoeBurstAlgorithm):
        def compute(self, data):
            if compute_boom:
                raise RuntimeError("boom")
            return super().compute(data)

        def write(self, tx, result):
            super().write(tx, result)
            if write_boom:
                raise RuntimeError("write failed")

    registry.register(
        AlgorithmDescriptor("test.inference.hooked", KIND_INFERENCE,
                            (Parameter("lvs", int, required=False,
                                       default=3),)),
        lambda: Hooked(store))


class TestWorker:
    def test_background_worker_drains_the_queue(self, world):
        store, engine = world
        stop = threading.Event()
        thread = threading.Thread(target=engine.run_forever, args=(stop,),
                                  daemon=True)
        thread.start()
        try:
            jobs = [engine.submit("goeburst", JobContext("p", "d", f"i{k}"))
                    for k in range(3)]
            deadline = time.monotonic() + 10
            while time.monotonic() < deadline:
                statuses = {engine.get(j.id).status for j in jobs}
                if statuses == {SUCCEEDED}:
                    break
                time.sleep(0.01)
            assert {engine.get(j.id).status for j in jobs} == {SUCCEEDED}
        finally:
            stop.set()
            thread.join(timeout=5)


class TestRecovery:
    def test_queued_jobs_survive_a_restart(self, tmp_path):
        store = make_store(tmp_path)
        seed_world(store)
        engine = JobEngine(store, default_registry(store))
        first = engine.submit("goeburst", JobContext("p", "d", "inf1"))
        second = engine.submit("goeburst", JobContext("p", "d", "inf2"))
        store.close()

        store = make_store(tmp_path)
        engine = JobEngine(store, default_registry(store))
        assert engine.pending() == 2
        # the busy claims are rebuilt too
        with pytest.raises(ResultBusyError):
            engine.submit("goeburst", JobContext("p", "d", "inf1"))
        assert engine.run_next() == first.id
        assert engine.run_next() == second.id
        assert engine.get(first.id).status == SUCCEEDED
        with store.begin() as tx:
            results = InferenceResultRepository(store)
            assert len(results.edges(tx, "p", "d", "inf1")) == 2
            assert len(results.edges(tx, "p", "d", "inf2")) == 2
        store.close()

    def test_job_interrupted_mid_run_is_requeued(self, tmp_path):
        store = make_store(tmp_path)
        seed_world(store)
        engine = JobEngine(store, default_registry(store))
        job = engine.submit("goeburst", JobContext("p", "d", "inf1"))
        # simulate a crash after the status flip but before completion
        engine._set_status(job.id, status=RUNNING, started="whenever")
        store.close()

        store = make_store(tmp_path)
        engine = JobEngine(store, default_registry(store))
        revived = engine.get(job.id)
        assert revived.status == QUEUED
        assert revived.started is None
        assert engine.run_next() == job.id
        assert engine.get(job.id).status == SUCCEEDED
        store.close()
