"""Project and dataset CRUD."""

from __future__ import annotations

from fastapi import APIRouter, Depends, Query, Response

from phylograph.domain import Dataset, Project, Schema, User

from ..schemas import (
    DatasetIn,
    DatasetOut,
    DatasetUpdate,
    PageEnvelope,
    ProjectIn,
    ProjectOut,
    ProjectUpdate,
)
from ..services import ServiceHub, page_of
from .deps import current_user, get_hub

router = APIRouter(dependencies=[Depends(current_user)])


def _project_out(project: Project) -> ProjectOut:
    return ProjectOut(id=project.id, name=project.name,
                      visibility=project.visibility,
                      members=sorted(project.members),
                      deprecated=project.deprecated)


def _dataset_out(dataset: Dataset, schema: Schema) -> DatasetOut:
    return DatasetOut(id=dataset.id, project=dataset.project,
                      schema_id=schema.id, taxon=schema.taxon,
                      loci=list(schema.loci),
                      description=dataset.description,
                      deprecated=dataset.deprecated)


@router.get("/projects", response_model=PageEnvelope[ProjectOut])
def list_projects(response: Response,
                  page: int = Query(0, ge=0),
                  limit: int | None = Query(None),
                  deprecated: bool = False,
                  user: User = Depends(current_user),
                  hub: ServiceHub = Depends(get_hub)):
    window = page_of(page, limit, hub.default_page_limit)
    items, total = hub.projects.list(user, window,
                                     include_deprecated=deprecated)
    response.headers["X-Total-Count"] = str(total)
    return PageEnvelope(items=[_project_out(p) for p in items],
                        page=window.offset, limit=window.limit, total=total)


@router.post("/projects", response_model=ProjectOut, status_code=201)
def create_project(body: ProjectIn, response: Response,
                   user: User = Depends(current_user),
                   hub: ServiceHub = Depends(get_hub)):
    created = hub.projects.create(user, Project(
        id=body.id, name=body.name, visibility=body.visibility,
        members=frozenset(body.members)))
    response.headers["Location"] = f"/projects/{created.id}"
    return _project_out(created)


@router.get("/projects/{project_id}", response_model=ProjectOut)
def get_project(project_id: str, deprecated: bool = False,
                user: User = Depends(current_user),
                hub: ServiceHub = Depends(get_hub)):
    return _project_out(hub.projects.get(user, project_id,
                                         include_deprecated=deprecated))


@router.put("/projects/{project_id}", response_model=ProjectOut)
def update_project(project_id: str, body: ProjectUpdate,
                   user: User = Depends(current_user),
                   hub: ServiceHub = Depends(get_hub)):
    return _project_out(hub.projects.update(
        user, project_id, name=body.name, visibility=body.visibility,
        members=body.members))


@router.delete("/projects/{project_id}", status_code=204)
def delete_project(project_id: str,
                   user: User = Depends(current_user),
                   hub: ServiceHub = Depends(get_hub)):
    hub.projects.delete(user, project_id)


@router.get("/projects/{project_id}/datasets",
            response_model=PageEnvelope[DatasetOut])
def list_datasets(project_id: str, response: Response,
                  page: int = Query(0, ge=0),
                  limit: int | None = Query(None),
                  deprecated: bool = False,
                  user: User = Depends(current_user),
                  hub: ServiceHub = Depends(get_hub)):
    window = page_of(page, limit, hub.default_page_limit)
    pairs, total = hub.datasets.list(user, project_id, window,
                                     include_deprecated=deprecated)
    response.headers["X-Total-Count"] = str(total)
    return PageEnvelope(items=[_dataset_out(d, s) for d, s in pairs],
                        page=window.offset, limit=window.limit, total=total)


@router.post("/projects/{project_id}/datasets",
             response_model=DatasetOut, status_code=201)
def create_dataset(project_id: str, body: DatasetIn, response: Response,
                   user: User = Depends(current_user),
                   hub: ServiceHub = Depends(get_hub)):
    inline = None
    if body.schema_def is not None:
        inline = Schema(id=body.schema_def.id, taxon=body.schema_def.taxon,
                        loci=tuple(body.schema_def.loci))
    created = hub.datasets.create(user, project_id, body.id,
                                  body.description, body.schema_id, inline)
    dataset, schema = hub.datasets.get(user, project_id, created.id)
    response.headers["Location"] = \
        f"/projects/{project_id}/datasets/{dataset.id}"
    return _dataset_out(dataset, schema)


@router.get("/projects/{project_id}/datasets/{dataset_id}",
            response_model=DatasetOut)
def get_dataset(project_id: str, dataset_id: str, deprecated: bool = False,
                user: User = Depends(current_user),
                hub: ServiceHub = Depends(get_hub)):
    dataset, schema = hub.datasets.get(user, project_id, dataset_id,
                                       include_deprecated=deprecated)
    return _dataset_out(dataset, schema)


@router.put("/projects/{project_id}/datasets/{dataset_id}",
            response_model=DatasetOut)
def update_dataset(project_id: str, dataset_id: str, body: DatasetUpdate,
                   user: User = Depends(current_user),
                   hub: ServiceHub = Depends(get_hub)):
    dataset, schema = hub.datasets.update(user, project_id, dataset_id,
                                          body.description)
    return _dataset_out(dataset, schema)


@router.delete("/projects/{project_id}/datasets/{dataset_id}",
               status_code=204)
def delete_dataset(project_id: str, dataset_id: str,
                   user: User = Depends(current_user),
                   hub: ServiceHub = Depends(get_hub)):
    hub.datasets.delete(user, project_id, dataset_id)
