"""Allelic profile endpoints: CRUD with version pinning, plus bulk TSV
import/export."""

from __future__ import annotations

from fastapi import APIRouter, Depends, HTTPException, Query, Request, Response
from fastapi.responses import PlainTextResponse

from phylograph.domain import AllelicProfile, User

from ..schemas import (
    ImportReportOut,
    PageEnvelope,
    ProfileIn,
    ProfileOut,
    RowErrorOut,
)
from ..services import ServiceHub, page_of
from .deps import current_user, get_hub

TSV_MEDIA_TYPE = "text/tab-separated-values"

router = APIRouter(prefix="/projects/{project_id}/datasets/{dataset_id}",
                   dependencies=[Depends(current_user)])


def _profile_out(profile: AllelicProfile) -> ProfileOut:
    return ProfileOut(id=profile.id, version=profile.version,
                      alleles=list(profile.alleles),
                      frequency=profile.frequency,
                      deprecated=profile.deprecated)


@router.get("/profiles", response_model=PageEnvelope[ProfileOut])
def list_profiles(project_id: str, dataset_id: str, response: Response,
                  page: int = Query(0, ge=0),
                  limit: int | None = Query(None),
                  deprecated: bool = False,
                  user: User = Depends(current_user),
                  hub: ServiceHub = Depends(get_hub)):
    window = page_of(page, limit, hub.default_page_limit)
    items, total = hub.profiles.list(user, project_id, dataset_id, window,
                                     include_deprecated=deprecated)
    response.headers["X-Total-Count"] = str(total)
    return PageEnvelope(items=[_profile_out(p) for p in items],
                        page=window.offset, limit=window.limit, total=total)


@router.post("/profiles", response_model=ProfileOut)
def upsert_profile(project_id: str, dataset_id: str, body: ProfileIn,
                   response: Response,
                   user: User = Depends(current_user),
                   hub: ServiceHub = Depends(get_hub)):
    stored, created = hub.profiles.upsert(user, project_id, dataset_id,
                                          body.id, body.alleles)
    if created:
        response.status_code = 201
        response.headers["Location"] = (
            f"/projects/{project_id}/datasets/{dataset_id}"
            f"/profiles/{stored.id}")
    return _profile_out(stored)


@router.get("/profiles/export", response_class=PlainTextResponse)
def export_profiles(project_id: str, dataset_id: str,
                    user: User = Depends(current_user),
                    hub: ServiceHub = Depends(get_hub)):
    table = hub.profiles.export_table(user, project_id, dataset_id)
    return PlainTextResponse(table, media_type=TSV_MEDIA_TYPE)


@router.post("/profiles/import", response_model=ImportReportOut)
async def import_profiles(project_id: str, dataset_id: str, request: Request,
                          user: User = Depends(current_user),
                          hub: ServiceHub = Depends(get_hub)):
    declared = request.headers.get("Content-Type", "").split(";")[0].strip()
    if declared != TSV_MEDIA_TYPE:
        raise HTTPException(
            400, f"import body must be {TSV_MEDIA_TYPE}, got "
            f"{declared or 'nothing'}")
    text = (await request.body()).decode("utf-8")
    report = hub.profiles.import_table(user, project_id, dataset_id, text)
    return ImportReportOut(
        created=report.created, updated=report.updated,
        errors=[RowErrorOut(line=e.line, message=e.message)
                for e in report.errors])


@router.get("/profiles/{profile_id}", response_model=ProfileOut)
def get_profile(project_id: str, dataset_id: str, profile_id: str,
                version: int | None = Query(None),
                deprecated: bool = False,
                user: User = Depends(current_user),
                hub: ServiceHub = Depends(get_hub)):
    return _profile_out(hub.profiles.get(user, project_id, dataset_id,
                                         profile_id, version=version,
                                         include_deprecated=deprecated))


@router.delete("/profiles/{profile_id}", status_code=204)
def delete_profile(project_id: str, dataset_id: str, profile_id: str,
                   user: User = Depends(current_user),
                   hub: ServiceHub = Depends(get_hub)):
    hub.profiles.delete(user, project_id, dataset_id, profile_id)
