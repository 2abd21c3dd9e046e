"""Domain-level error taxonomy.

The HTTP layer maps these onto status codes (ValidationError and its
subclasses to 400, the Unknown* family to 404, AccessDeniedError to 403),
so repositories raise them instead of speaking HTTP themselves.
"""

from __future__ import annotations


class DomainError(Exception):
    """Base class for every error raised by the domain layer."""


class ValidationError(DomainError):
    pass


class SchemaMismatchError(ValidationError):
    def __init__(self, expected: int, got: int):
        super().__init__(f"expected {expected} allele slots, got {got}")
        self.expected = expected
        self.got = got


class HeaderMismatchError(ValidationError):
    pass


class CrossDatasetLinkError(ValidationError):
    pass


class AccessDeniedError(DomainError):
    pass


class NotFoundError(DomainError):
    pass


class UnknownProjectError(NotFoundError):
    pass


class UnknownSchemaError(NotFoundError):
    pass


class UnknownDatasetError(NotFoundError):
    pass


class UnknownProfileError(NotFoundError):
    pass


class UnknownIsolateError(NotFoundError):
    pass


class UnknownAlleleError(NotFoundError):
    pass


class UnknownInferenceError(NotFoundError):
    pass


class UnknownVisualizationError(NotFoundError):
    pass
