"""Phylogenetic domain model: entities, repositories, TSV import/export."""

from .errors import (
    AccessDeniedError,
    CrossDatasetLinkError,
    DomainError,
    HeaderMismatchError,
    NotFoundError,
    SchemaMismatchError,
    UnknownAlleleError,
    UnknownDatasetError,
    UnknownInferenceError,
    UnknownIsolateError,
    UnknownProfileError,
    UnknownProjectError,
    UnknownSchemaError,
    UnknownVisualizationError,
    ValidationError,
)
from .models import (
    Allele,
    AllelicProfile,
    Dataset,
    Isolate,
    PRIVATE,
    PUBLIC,
    Project,
    ROLE_ADMIN,
    ROLE_USER,
    Schema,
    User,
)
from .repositories import (
    AlleleRepository,
    DatasetRepository,
    ImportReport,
    IsolateRepository,
    ProfileRepository,
    ProjectRepository,
    SchemaRepository,
    UserRepository,
    ensure_indexes,
)

__all__ = [
    "AccessDeniedError",
    "Allele",
    "AlleleRepository",
    "AllelicProfile",
    "CrossDatasetLinkError",
    "Dataset",
    "DatasetRepository",
    "DomainError",
    "HeaderMismatchError",
    "ImportReport",
    "Isolate",
    "IsolateRepository",
    "NotFoundError",
    "PRIVATE",
    "PUBLIC",
    "ProfileRepository",
    "Project",
    "ProjectRepository",
    "ROLE_ADMIN",
    "ROLE_USER",
    "Schema",
    "SchemaMismatchError",
    "SchemaRepository",
    "UnknownAlleleError",
    "UnknownDatasetError",
    "UnknownInferenceError",
    "UnknownIsolateError",
    "UnknownProfileError",
    "UnknownProjectError",
    "UnknownSchemaError",
    "UnknownVisualizationError",
    "User",
    "UserRepository",
    "ValidationError",
    "ensure_indexes",
]
