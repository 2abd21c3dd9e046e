"""Algorithm registry and the queued two-transaction job executor."""

from .builtins import default_registry
from .jobs import FAILED, Job, JobEngine, QUEUED, RUNNING, SUCCEEDED
from .registry import (
    Algorithm,
    AlgorithmDescriptor,
    AlgorithmRegistry,
    DuplicateAlgorithmError,
    EngineError,
    InvalidContextError,
    JobContext,
    KIND_INFERENCE,
    KIND_VISUALIZATION,
    Parameter,
    ParameterValidationError,
    ResultBusyError,
    UnknownAlgorithmError,
    UnknownJobError,
)

__all__ = [
    "Algorithm",
    "AlgorithmDescriptor",
    "AlgorithmRegistry",
    "DuplicateAlgorithmError",
    "EngineError",
    "FAILED",
    "InvalidContextError",
    "Job",
    "JobContext",
    "JobEngine",
    "KIND_INFERENCE",
    "KIND_VISUALIZATION",
    "Parameter",
    "ParameterValidationError",
    "QUEUED",
    "ResultBusyError",
    "RUNNING",
    "SUCCEEDED",
    "UnknownAlgorithmError",
    "UnknownJobError",
    "default_registry",
]
