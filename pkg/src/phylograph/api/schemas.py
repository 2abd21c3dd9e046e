"""Request and response bodies. All JSON fields are lower snake_case."""

from __future__ import annotations

from typing import Generic, TypeVar

from pydantic import BaseModel, ConfigDict, Field

T = TypeVar("T")


class ErrorBody(BaseModel):
    status: int
    message: str
    details: list | None = None


class PageEnvelope(BaseModel, Generic[T]):
    items: list[T]
    page: int
    limit: int
    total: int


# -- projects and datasets --------------------------------------------------

class ProjectIn(BaseModel):
    id: str
    name: str = ""
    visibility: str = "public"
    members: list[str] = Field(default_factory=list)


class ProjectUpdate(BaseModel):
    name: str | None = None
    visibility: str | None = None
    members: list[str] | None = None


class ProjectOut(BaseModel):
    id: str
    name: str
    visibility: str
    members: list[str]
    deprecated: bool


class SchemaIn(BaseModel):
    id: str
    taxon: str
    loci: list[str]


class DatasetIn(BaseModel):
    id: str
    description: str = ""
    schema_id: str | None = None
    schema_def: SchemaIn | None = Field(default=None, alias="schema")

    model_config = ConfigDict(populate_by_name=True)


class DatasetUpdate(BaseModel):
    description: str


class DatasetOut(BaseModel):
    id: str
    project: str
    schema_id: str
    taxon: str
    loci: list[str]
    description: str
    deprecated: bool


# -- profiles ----------------------------------------------------------------

class ProfileIn(BaseModel):
    id: str
    alleles: list[str | None]


class ProfileOut(BaseModel):
    id: str
    version: int
    alleles: list[str | None]
    frequency: int
    deprecated: bool


class RowErrorOut(BaseModel):
    line: int
    message: str


class ImportReportOut(BaseModel):
    created: int
    updated: int
    errors: list[RowErrorOut]


# -- analyses ----------------------------------------------------------------

class InferenceRequest(BaseModel):
    algorithm: str
    parameters: dict = Field(default_factory=dict)
    id: str | None = None


class InferenceAccepted(BaseModel):
    job_id: str
    inference_id: str


class EdgeOut(BaseModel):
    source: str = Field(alias="from")
    target: str = Field(alias="to")
    distance: int

    model_config = ConfigDict(populate_by_name=True)


class InferenceOut(BaseModel):
    id: str
    algorithm: str
    parameters: dict
    edges: list[EdgeOut]


class VisualizationRequest(BaseModel):
    algorithm: str
    id: str | None = None


class VisualizationAccepted(BaseModel):
    job_id: str
    visualization_id: str


class CoordinateOut(BaseModel):
    profile: str
    x: float
    y: float


class VisualizationOut(BaseModel):
    id: str
    inference: str
    algorithm: str
    coordinates: list[CoordinateOut]


class JobOut(BaseModel):
    id: str
    algorithm: str
    project: str
    dataset: str
    result_id: str
    inference_id: str | None
    status: str
    error: str | None
    submitted: str | None
    started: str | None
    finished: str | None
