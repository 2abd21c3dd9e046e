"""Typed views of the phylogenetic entities held in the graph store.

All types are immutable value objects; repositories return fresh instances
per read, so they are safe to share across threads. A missing allele slot
is ``None`` throughout (serialized as ``"0"`` in TSV).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

PUBLIC = "public"
PRIVATE = "private"

ROLE_ADMIN = "admin"
ROLE_USER = "user"


@dataclass(frozen=True, slots=True)
class User:
    id: str
    role: str = ROLE_USER


@dataclass(frozen=True, slots=True)
class Project:
    id: str
    name: str = ""
    visibility: str = PUBLIC
    members: frozenset[str] = field(default_factory=frozenset)
    deprecated: bool = False


@dataclass(frozen=True, slots=True)
class Schema:
    """An ordered locus list for one taxon; the order is fixed for life."""

    id: str
    taxon: str
    loci: tuple[str, ...]
    version: int = 1


@dataclass(frozen=True, slots=True)
class Dataset:
    id: str
    project: str
    schema: str
    description: str = ""
    deprecated: bool = False


@dataclass(frozen=True, slots=True)
class AllelicProfile:
    """One typed profile: an allele identifier (or ``None``) per schema locus.

    ``frequency`` counts the non-deprecated isolates currently linked to the
    profile; repositories maintain it on every link/unlink/delete.
    """

    id: str
    alleles: tuple[str | None, ...]
    frequency: int = 0
    version: int = 1
    deprecated: bool = False


@dataclass(frozen=True, slots=True)
class Isolate:
    id: str
    profile: str | None = None
    ancillary: Mapping[str, str] = field(default_factory=dict)
    version: int = 1
    deprecated: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "ancillary", MappingProxyType(dict(self.ancillary)))


@dataclass(frozen=True, slots=True)
class Allele:
    locus: str
    id: str
    sequence: str | None = None
    version: int = 1
    deprecated: bool = False
