"""Asynchronous analyses: submit jobs, poll them, fetch results.

Submissions return 202 immediately; results appear under their own URLs
once the corresponding job has succeeded (and 404 until then).
"""

from __future__ import annotations

from fastapi import APIRouter, Depends

from phylograph.domain import User
from phylograph.engine import Job

from ..schemas import (
    CoordinateOut,
    EdgeOut,
    InferenceAccepted,
    InferenceOut,
    InferenceRequest,
    JobOut,
    VisualizationAccepted,
    VisualizationOut,
    VisualizationRequest,
)
from ..services import ServiceHub
from .deps import current_user, get_hub

router = APIRouter(dependencies=[Depends(current_user)])

DATASET_PREFIX = "/projects/{project_id}/datasets/{dataset_id}"


def _short(algorithm: str) -> str:
    return algorithm.rsplit(".", 1)[-1]


def _job_out(job: Job) -> JobOut:
    return JobOut(id=job.id, algorithm=_short(job.algorithm),
                  project=job.project, dataset=job.dataset,
                  result_id=job.result_id, inference_id=job.inference,
                  status=job.status, error=job.error,
                  submitted=job.submitted, started=job.started,
                  finished=job.finished)


@router.post(DATASET_PREFIX + "/inferences",
             response_model=InferenceAccepted, status_code=202)
def submit_inference(project_id: str, dataset_id: str, body: InferenceRequest,
                     user: User = Depends(current_user),
                     hub: ServiceHub = Depends(get_hub)):
    job = hub.analyses.submit_inference(user, project_id, dataset_id,
                                        body.algorithm, body.parameters,
                                        body.id)
    return InferenceAccepted(job_id=job.id, inference_id=job.result_id)


@router.get(DATASET_PREFIX + "/inferences/{inference_id}",
            response_model=InferenceOut)
def get_inference(project_id: str, dataset_id: str, inference_id: str,
                  user: User = Depends(current_user),
                  hub: ServiceHub = Depends(get_hub)):
    result = hub.analyses.get_inference(user, project_id, dataset_id,
                                        inference_id)
    return InferenceOut(
        id=result.id, algorithm=_short(result.algorithm),
        parameters=dict(result.parameters),
        edges=[EdgeOut(source=a, target=b, distance=d)
               for a, b, d in result.edges])


@router.post(DATASET_PREFIX + "/inferences/{inference_id}/visualizations",
             response_model=VisualizationAccepted, status_code=202)
def submit_visualization(project_id: str, dataset_id: str, inference_id: str,
                         body: VisualizationRequest,
                         user: User = Depends(current_user),
                         hub: ServiceHub = Depends(get_hub)):
    job = hub.analyses.submit_visualization(user, project_id, dataset_id,
                                            inference_id, body.algorithm,
                                            body.id)
    return VisualizationAccepted(job_id=job.id,
                                 visualization_id=job.result_id)


@router.get(DATASET_PREFIX +
            "/inferences/{inference_id}/visualizations/{visualization_id}",
            response_model=VisualizationOut)
def get_visualization(project_id: str, dataset_id: str, inference_id: str,
                      visualization_id: str,
                      user: User = Depends(current_user),
                      hub: ServiceHub = Depends(get_hub)):
    result = hub.analyses.get_visualization(user, project_id, dataset_id,
                                            inference_id, visualization_id)
    return VisualizationOut(
        id=result.id, inference=result.inference,
        algorithm=_short(result.algorithm),
        coordinates=[CoordinateOut(profile=pid, x=x, y=y)
                     for pid, x, y in result.coordinates])


@router.get("/jobs/{job_id}", response_model=JobOut)
def get_job(job_id: str, user: User = Depends(current_user),
            hub: ServiceHub = Depends(get_hub)):
    return _job_out(hub.analyses.get_job(user, job_id))
