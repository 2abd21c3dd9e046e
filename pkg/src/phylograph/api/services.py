"""Service layer between HTTP controllers and the repositories.

Controllers hand over validated request bodies plus the authenticated
user; services open short-lived transactions, apply domain calls, and
return domain objects. Nothing here knows about HTTP — errors stay as
domain/engine exceptions, translated to status codes by the app's
exception handlers.
"""

from __future__ import annotations

from dataclasses import replace

from phylograph.domain import (
    AccessDeniedError,
    AllelicProfile,
    Dataset,
    DatasetRepository,
    ImportReport,
    Project,
    ProjectRepository,
    ProfileRepository,
    Schema,
    SchemaRepository,
    UnknownDatasetError,
    UnknownInferenceError,
    UnknownProjectError,
    UnknownProfileError,
    UnknownVisualizationError,
    User,
    ValidationError,
)
from phylograph.engine import (
    Job,
    JobContext,
    JobEngine,
    KIND_INFERENCE,
    KIND_VISUALIZATION,
    UnknownAlgorithmError,
)
from phylograph.graphstore import GraphStore, Page
from phylograph.inference import InferenceResult, InferenceResultRepository
from phylograph.viz import VisualizationRepository, VisualizationResult

API_TAG = "api"
MAX_PAGE_LIMIT = 1000


def page_of(page: int, limit: int | None, default_limit: int) -> Page:
    """Page params with the limit clamped into [1, 1000]."""
    if limit is None:
        limit = default_limit
    return Page(offset=page, limit=max(1, min(MAX_PAGE_LIMIT, limit)))


class ProjectService:
    def __init__(self, store: GraphStore):
        self.store = store
        self.repo = ProjectRepository(store)

    def create(self, user: User, project: Project) -> Project:
        """The creator joins the member list automatically — otherwise a
        plain user would create a project they cannot touch again."""
        project = replace(project,
                          members=project.members | {user.id})
        with self.store.begin("write", tag=API_TAG) as tx:
            if self._occupied(tx, project.id, user):
                raise ValidationError(
                    f"project id {project.id!r} is already in use")
            self.repo.save(tx, project, user=user)
            created = self.repo.get(tx, project.id, user=user)
            tx.commit()
        return created

    def _occupied(self, tx, project_id: str, user: User) -> bool:
        try:
            return self.repo.get(tx, project_id, user=user,
                                 include_deprecated=True) is not None
        except AccessDeniedError:
            # unreadable (someone else's private project) still means taken
            return True

    def get(self, user: User, project_id: str,
            include_deprecated: bool = False) -> Project:
        with self.store.begin("read", tag=API_TAG) as tx:
            found = self.repo.get(tx, project_id, user=user,
                                  include_deprecated=include_deprecated)
        if found is None:
            raise UnknownProjectError(
                f"project {project_id!r} does not exist")
        return found

    def update(self, user: User, project_id: str, *,
               name: str | None = None, visibility: str | None = None,
               members: list[str] | None = None) -> Project:
        with self.store.begin("write", tag=API_TAG) as tx:
            existing = self.repo.get(tx, project_id, user=user)
            if existing is None:
                raise UnknownProjectError(
                    f"project {project_id!r} does not exist")
            updated = replace(
                existing,
                name=existing.name if name is None else name,
                visibility=(existing.visibility if visibility is None
                            else visibility),
                members=(existing.members if members is None
                         else frozenset(members)),
            )
            self.repo.save(tx, updated, user=user)
            tx.commit()
        return updated

    def list(self, user: User, page: Page,
             include_deprecated: bool = False) -> tuple[list[Project], int]:
        with self.store.begin("read", tag=API_TAG) as tx:
            items = self.repo.list(tx, page=page, user=user,
                                   include_deprecated=include_deprecated)
            total = self.repo.count(tx, user=user,
                                    include_deprecated=include_deprecated)
        return items, total

    def delete(self, user: User, project_id: str) -> None:
        with self.store.begin("write", tag=API_TAG) as tx:
            self.repo.delete(tx, project_id, user=user)
            tx.commit()


class DatasetService:
    def __init__(self, store: GraphStore):
        self.store = store
        self.repo = DatasetRepository(store)
        self.schemas = SchemaRepository(store)

    def create(self, user: User, project_id: str, dataset_id: str,
               description: str, schema_id: str | None,
               schema: Schema | None) -> Dataset:
        if (schema_id is None) == (schema is None):
            raise ValidationError(
                "provide either schema_id or an inline schema, not both")
        with self.store.begin("write", tag=API_TAG) as tx:
            if schema is not None:
                self.schemas.save(tx, schema, user=user)
                schema_id = schema.id
            if self.repo.get(tx, project_id, dataset_id, user=user,
                             include_deprecated=True) is not None:
                raise ValidationError(
                    f"dataset id {dataset_id!r} is already in use")
            self.repo.save(tx, Dataset(id=dataset_id, project=project_id,
                                       schema=schema_id,
                                       description=description), user=user)
            created = self.repo.get(tx, project_id, dataset_id, user=user)
            tx.commit()
        return created

    def get(self, user: User, project_id: str, dataset_id: str,
            include_deprecated: bool = False) -> tuple[Dataset, Schema]:
        with self.store.begin("read", tag=API_TAG) as tx:
            found = self.repo.get(tx, project_id, dataset_id, user=user,
                                  include_deprecated=include_deprecated)
            if found is None:
                raise UnknownDatasetError(
                    f"dataset {dataset_id!r} does not exist")
            return found, self.schemas.get(tx, found.schema)

    def update(self, user: User, project_id: str, dataset_id: str,
               description: str) -> tuple[Dataset, Schema]:
        with self.store.begin("write", tag=API_TAG) as tx:
            existing = self.repo.get(tx, project_id, dataset_id, user=user)
            if existing is None:
                raise UnknownDatasetError(
                    f"dataset {dataset_id!r} does not exist")
            updated = replace(existing, description=description)
            self.repo.save(tx, updated, user=user)
            schema = self.schemas.get(tx, existing.schema)
            tx.commit()
        return updated, schema

    def list(self, user: User, project_id: str, page: Page,
             include_deprecated: bool = False
             ) -> tuple[list[tuple[Dataset, Schema]], int]:
        with self.store.begin("read", tag=API_TAG) as tx:
            items = self.repo.list(tx, project_id, page=page, user=user,
                                   include_deprecated=include_deprecated)
            total = self.repo.count(tx, project_id, user=user,
                                    include_deprecated=include_deprecated)
            return [(d, self.schemas.get(tx, d.schema)) for d in items], total

    def delete(self, user: User, project_id: str, dataset_id: str) -> None:
        with self.store.begin("write", tag=API_TAG) as tx:
            self.repo.delete(tx, project_id, dataset_id, user=user)
            tx.commit()


class ProfileService:
    def __init__(self, store: GraphStore):
        self.store = store
        self.repo = ProfileRepository(store)

    def upsert(self, user: User, project_id: str, dataset_id: str,
               profile_id: str, alleles: list[str | None]
               ) -> tuple[AllelicProfile, bool]:
        """Returns the stored profile and whether it was newly created."""
        with self.store.begin("write", tag=API_TAG) as tx:
            existed = self.repo.get(tx, project_id, dataset_id, profile_id,
                                    user=user,
                                    include_deprecated=True) is not None
            self.repo.save(tx, project_id, dataset_id,
                           AllelicProfile(id=profile_id,
                                          alleles=tuple(alleles)),
                           user=user)
            stored = self.repo.get(tx, project_id, dataset_id, profile_id,
                                   user=user)
            tx.commit()
        return stored, not existed

    def get(self, user: User, project_id: str, dataset_id: str,
            profile_id: str, version: int | None = None,
            include_deprecated: bool = False) -> AllelicProfile:
        with self.store.begin("read", tag=API_TAG) as tx:
            found = self.repo.get(tx, project_id, dataset_id, profile_id,
                                  version=version, user=user,
                                  include_deprecated=include_deprecated)
        if found is None:
            raise UnknownProfileError(
                f"profile {profile_id!r} does not exist")
        return found

    def list(self, user: User, project_id: str, dataset_id: str, page: Page,
             include_deprecated: bool = False
             ) -> tuple[list[AllelicProfile], int]:
        with self.store.begin("read", tag=API_TAG) as tx:
            items = self.repo.list(tx, project_id, dataset_id, page=page,
                                   user=user,
                                   include_deprecated=include_deprecated)
            total = self.repo.count(tx, project_id, dataset_id, user=user,
                                    include_deprecated=include_deprecated)
        return items, total

    def delete(self, user: User, project_id: str, dataset_id: str,
               profile_id: str) -> None:
        with self.store.begin("write", tag=API_TAG) as tx:
            self.repo.delete(tx, project_id, dataset_id, profile_id,
                             user=user)
            tx.commit()

    def import_table(self, user: User, project_id: str, dataset_id: str,
                     text: str) -> ImportReport:
        with self.store.begin("write", tag=API_TAG) as tx:
            report = self.repo.import_table(tx, project_id, dataset_id, text,
                                            user=user)
            tx.commit()
        return report

    def export_table(self, user: User, project_id: str,
                     dataset_id: str) -> str:
        with self.store.begin("read", tag=API_TAG) as tx:
            return self.repo.export_table(tx, project_id, dataset_id,
                                          user=user)


class AnalysisService:
    """Job submission and result retrieval for inferences and layouts."""

    def __init__(self, store: GraphStore, engine: JobEngine):
        self.store = store
        self.engine = engine
        self.projects = ProjectRepository(store)
        self.datasets = DatasetRepository(store)
        self.results = InferenceResultRepository(store)
        self.layouts = VisualizationRepository(store)

    def submit_inference(self, user: User, project_id: str, dataset_id: str,
                         algorithm: str, parameters: dict,
                         inference_id: str | None) -> Job:
        self._write_gate(user, project_id, dataset_id)
        self._require_kind(algorithm, KIND_INFERENCE)
        return self.engine.submit(
            algorithm,
            JobContext(project_id, dataset_id, inference_id or ""),
            parameters)

    def submit_visualization(self, user: User, project_id: str,
                             dataset_id: str, inference_id: str,
                             algorithm: str,
                             visualization_id: str | None) -> Job:
        self._write_gate(user, project_id, dataset_id)
        with self.store.begin("read", tag=API_TAG) as tx:
            if self.results.fetch(tx, project_id, dataset_id,
                                  inference_id) is None:
                raise UnknownInferenceError(
                    f"inference {inference_id!r} does not exist")
        self._require_kind(algorithm, KIND_VISUALIZATION)
        return self.engine.submit(
            algorithm,
            JobContext(project_id, dataset_id, visualization_id or "",
                       inference=inference_id),
            parameters=None)

    def get_inference(self, user: User, project_id: str, dataset_id: str,
                      inference_id: str) -> InferenceResult:
        with self.store.begin("read", tag=API_TAG) as tx:
            self._read_gate(tx, user, project_id, dataset_id)
            found = self.results.fetch(tx, project_id, dataset_id,
                                       inference_id)
        if found is None:
            raise UnknownInferenceError(
                f"inference {inference_id!r} does not exist")
        return found

    def get_visualization(self, user: User, project_id: str, dataset_id: str,
                          inference_id: str, visualization_id: str
                          ) -> VisualizationResult:
        with self.store.begin("read", tag=API_TAG) as tx:
            self._read_gate(tx, user, project_id, dataset_id)
            found = self.layouts.fetch(tx, project_id, dataset_id,
                                       inference_id, visualization_id)
        if found is None:
            raise UnknownVisualizationError(
                f"visualization {visualization_id!r} does not exist")
        return found

    def get_job(self, user: User, job_id: str) -> Job:
        job = self.engine.get(job_id)
        with self.store.begin("read", tag=API_TAG) as tx:
            # privacy gate: seeing a job requires read access to its project
            self.projects.get(tx, job.project, user=user,
                              include_deprecated=True)
        return job

    # -- gates ----------------------------------------------------------

    def _write_gate(self, user: User, project_id: str,
                    dataset_id: str) -> None:
        with self.store.begin("read", tag=API_TAG) as tx:
            self.projects.require_write(tx, project_id, user=user)
            if self.datasets.get(tx, project_id, dataset_id,
                                 user=user) is None:
                raise UnknownDatasetError(
                    f"dataset {dataset_id!r} does not exist")

    def _read_gate(self, tx, user: User, project_id: str,
                   dataset_id: str) -> None:
        if self.datasets.get(tx, project_id, dataset_id, user=user) is None:
            raise UnknownDatasetError(
                f"dataset {dataset_id!r} does not exist")

    def _require_kind(self, algorithm: str, kind: str) -> None:
        descriptor, _ = self.engine.registry.get(algorithm)
        if descriptor.kind != kind:
            raise UnknownAlgorithmError(
                f"{descriptor.name} is not a {kind} algorithm")


class ServiceHub:
    """Everything the controllers are allowed to reach, in one place."""

    def __init__(self, store: GraphStore, engine: JobEngine,
                 default_page_limit: int = 20):
        self.projects = ProjectService(store)
        self.datasets = DatasetService(store)
        self.profiles = ProfileService(store)
        self.analyses = AnalysisService(store, engine)
        self.default_page_limit = default_page_limit
