"""Repositories mapping the phylogenetic entities onto the graph store.

Every operation runs inside a caller-supplied transaction; nothing here
begins or commits one. Entities with history (schemas, profiles, isolates,
alleles) are stored as versioned identity/state pairs; projects, datasets
and users are single mutable nodes.

Business keys are caller-supplied strings. Projects and schemas are keyed
globally, datasets per project, profiles and isolates per dataset, alleles
per (taxon, locus). Composite scope keys are joined with an ASCII unit
separator, which ids may not contain (no control characters allowed).

Passing an acting ``user`` turns on authorization: admins may do anything,
project members may read and write their project, everyone may read public
projects. ``user=None`` means an internal caller and skips the checks.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from phylograph.graphstore import (
    DEPRECATED,
    GraphStore,
    NodeRecord,
    Page,
    Transaction,
    create_versioned,
    get_versioned,
    put_versioned,
)
from .errors import (
    AccessDeniedError,
    CrossDatasetLinkError,
    SchemaMismatchError,
    UnknownDatasetError,
    UnknownIsolateError,
    UnknownProfileError,
    UnknownProjectError,
    UnknownSchemaError,
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
from . import tsv

SEP = "\x1f"

PROJECT = "Project"
SCHEMA = "Schema"
DATASET = "Dataset"
PROFILE = "Profile"
ISOLATE = "Isolate"
ALLELE = "Allele"
USER = "User"

_SEQUENCE_ALPHABET = frozenset("ACGTN")


def ensure_indexes(store: GraphStore) -> None:
    """Create the lookup indexes the repositories rely on (idempotent)."""
    for label in (PROJECT, SCHEMA, DATASET, PROFILE, ISOLATE, ALLELE, USER):
        store.ensure_node_index(label, "key")
    store.ensure_node_index(DATASET, "project")
    store.ensure_node_index(PROFILE, "dataset")
    store.ensure_node_index(ISOLATE, "dataset")


def check_id(value: str, what: str = "id") -> str:
    if not isinstance(value, str) or not value:
        raise ValidationError(f"{what} must be a non-empty string")
    if any(ord(c) < 32 or ord(c) == 127 for c in value):
        raise ValidationError(f"{what} may not contain control characters")
    return value


def scope_key(*parts: str) -> str:
    return SEP.join(parts)


def _unique(store: GraphStore, tx: Transaction, label: str,
            key: str) -> NodeRecord | None:
    hits = store.match_nodes(tx, label, {"key": key}, include_deprecated=True)
    return hits[0] if hits else None


# --- project-level access ----------------------------------------------

def _check_access(record: NodeRecord, user: User | None, *, write: bool) -> None:
    if user is None or user.role == ROLE_ADMIN:
        return
    members = json.loads(record.properties["members"])
    if user.id in members:
        return
    if not write and record.properties["visibility"] == PUBLIC:
        return
    verb = "write to" if write else "read"
    raise AccessDeniedError(
        f"user {user.id!r} may not {verb} project {record.properties['id']!r}")


def _require_project(store: GraphStore, tx: Transaction, project_id: str,
                     user: User | None, *, write: bool) -> NodeRecord:
    record = _unique(store, tx, PROJECT, project_id)
    if record is None or record.properties.get(DEPRECATED):
        raise UnknownProjectError(f"project {project_id!r} does not exist")
    _check_access(record, user, write=write)
    return record


def _require_dataset(store: GraphStore, tx: Transaction, project_id: str,
                     dataset_id: str, user: User | None,
                     *, write: bool) -> NodeRecord:
    _require_project(store, tx, project_id, user, write=write)
    record = _unique(store, tx, DATASET, scope_key(project_id, dataset_id))
    if record is None or record.properties.get(DEPRECATED):
        raise UnknownDatasetError(
            f"dataset {dataset_id!r} does not exist in project {project_id!r}")
    return record


class ProjectRepository:
    def __init__(self, store: GraphStore):
        self.store = store
        ensure_indexes(store)

    def save(self, tx: Transaction, project: Project,
             user: User | None = None) -> None:
        check_id(project.id, "project id")
        if project.visibility not in (PUBLIC, PRIVATE):
            raise ValidationError(f"unknown visibility {project.visibility!r}")
        props = {
            "key": project.id,
            "id": project.id,
            "name": project.name,
            "visibility": project.visibility,
            "members": json.dumps(sorted(project.members)),
            DEPRECATED: False,
        }
        existing = _unique(self.store, tx, PROJECT, project.id)
        if existing is None:
            self.store.create_node(tx, {PROJECT}, props)
            return
        if existing.properties.get(DEPRECATED):
            raise UnknownProjectError(f"project {project.id!r} does not exist")
        _check_access(existing, user, write=True)
        self.store.update_node(tx, existing.id, props)

    def get(self, tx: Transaction, project_id: str, user: User | None = None,
            include_deprecated: bool = False) -> Project | None:
        record = _unique(self.store, tx, PROJECT, project_id)
        if record is None:
            return None
        _check_access(record, user, write=False)
        if record.properties.get(DEPRECATED) and not include_deprecated:
            return None
        return _to_project(record)

    def list(self, tx: Transaction, page: Page | None = None,
             user: User | None = None,
             include_deprecated: bool = False) -> list[Project]:
        visible = self._visible(tx, user, include_deprecated)
        if page is not None:
            start = page.offset * page.limit
            visible = visible[start:start + page.limit]
        return [_to_project(r) for r in visible]

    def count(self, tx: Transaction, user: User | None = None,
              include_deprecated: bool = False) -> int:
        return len(self._visible(tx, user, include_deprecated))

    def _visible(self, tx: Transaction, user: User | None,
                 include_deprecated: bool) -> list[NodeRecord]:
        records = self.store.match_nodes(
            tx, PROJECT, include_deprecated=include_deprecated)
        if user is None or user.role == ROLE_ADMIN:
            return records
        return [r for r in records
                if r.properties["visibility"] == PUBLIC
                or user.id in json.loads(r.properties["members"])]

    def require_write(self, tx: Transaction, project_id: str,
                      user: User | None = None) -> Project:
        """Existence plus write-permission gate, for callers that mutate
        things scoped under a project without going through this repo."""
        record = _require_project(self.store, tx, project_id, user, write=True)
        return _to_project(record)

    def delete(self, tx: Transaction, project_id: str,
               user: User | None = None) -> None:
        record = _require_project(self.store, tx, project_id, user, write=True)
        self.store.soft_delete(tx, record.id)

    def restore(self, tx: Transaction, project_id: str,
                user: User | None = None) -> None:
        record = _unique(self.store, tx, PROJECT, project_id)
        if record is None:
            raise UnknownProjectError(f"project {project_id!r} does not exist")
        _check_access(record, user, write=True)
        self.store.restore(tx, record.id)


def _to_project(record: NodeRecord) -> Project:
    p = record.properties
    return Project(
        id=p["id"],
        name=p["name"],
        visibility=p["visibility"],
        members=frozenset(json.loads(p["members"])),
        deprecated=bool(p.get(DEPRECATED)),
    )


class SchemaRepository:
    """Typing schemas are shared reference data: readable by anyone,
    writable by any authenticated caller, and their locus order is fixed
    for life (changing it would silently invalidate stored profiles)."""

    def __init__(self, store: GraphStore):
        self.store = store
        ensure_indexes(store)

    def save(self, tx: Transaction, schema: Schema,
             user: User | None = None) -> int:
        check_id(schema.id, "schema id")
        check_id(schema.taxon, "taxon")
        if not schema.loci:
            raise ValidationError("a schema needs at least one locus")
        for locus in schema.loci:
            check_id(locus, "locus id")
        if len(set(schema.loci)) != len(schema.loci):
            raise ValidationError("duplicate locus ids in schema")
        state = {"taxon": schema.taxon, "loci": json.dumps(list(schema.loci))}
        existing = _unique(self.store, tx, SCHEMA, schema.id)
        if existing is None:
            create_versioned(tx, {SCHEMA}, {"key": schema.id, "id": schema.id},
                             state)
            return 1
        current = get_versioned(tx, existing.id)
        if json.loads(current.properties["loci"]) != list(schema.loci):
            raise ValidationError(
                f"loci of schema {schema.id!r} are fixed after creation")
        if current.properties == state:
            return current.version
        return put_versioned(tx, existing.id, state)

    def get(self, tx: Transaction, schema_id: str,
            version: int | None = None) -> Schema | None:
        record = _unique(self.store, tx, SCHEMA, schema_id)
        if record is None or record.properties.get(DEPRECATED):
            return None
        st = get_versioned(tx, record.id, version)
        return Schema(
            id=schema_id,
            taxon=st.properties["taxon"],
            loci=tuple(json.loads(st.properties["loci"])),
            version=st.version,
        )

    def loci(self, tx: Transaction, schema_id: str) -> tuple[str, ...]:
        schema = self.get(tx, schema_id)
        if schema is None:
            raise UnknownSchemaError(f"schema {schema_id!r} does not exist")
        return schema.loci


class DatasetRepository:
    def __init__(self, store: GraphStore):
        self.store = store
        self._schemas = SchemaRepository(store)

    def save(self, tx: Transaction, dataset: Dataset,
             user: User | None = None) -> None:
        check_id(dataset.id, "dataset id")
        _require_project(self.store, tx, dataset.project, user, write=True)
        if self._schemas.get(tx, dataset.schema) is None:
            raise UnknownSchemaError(f"schema {dataset.schema!r} does not exist")
        key = scope_key(dataset.project, dataset.id)
        existing = _unique(self.store, tx, DATASET, key)
        if existing is None:
            self.store.create_node(tx, {DATASET}, {
                "key": key,
                "id": dataset.id,
                "project": dataset.project,
                "schema": dataset.schema,
                "description": dataset.description,
                DEPRECATED: False,
                "profile_count": 0,
                "profile_count_active": 0,
                "id_header": "id",
            })
            return
        if existing.properties.get(DEPRECATED):
            raise UnknownDatasetError(f"dataset {dataset.id!r} does not exist")
        if existing.properties["schema"] != dataset.schema:
            raise ValidationError(
                "the schema of a dataset is fixed after creation")
        props = dict(existing.properties)
        props["description"] = dataset.description
        self.store.update_node(tx, existing.id, props)

    def get(self, tx: Transaction, project_id: str, dataset_id: str,
            user: User | None = None,
            include_deprecated: bool = False) -> Dataset | None:
        _require_project(self.store, tx, project_id, user, write=False)
        record = _unique(self.store, tx, DATASET,
                         scope_key(project_id, dataset_id))
        if record is None:
            return None
        if record.properties.get(DEPRECATED) and not include_deprecated:
            return None
        return _to_dataset(record)

    def list(self, tx: Transaction, project_id: str,
             page: Page | None = None, user: User | None = None,
             include_deprecated: bool = False) -> list[Dataset]:
        _require_project(self.store, tx, project_id, user, write=False)
        records = self.store.match_nodes(
            tx, DATASET, {"project": project_id}, page=page,
            include_deprecated=include_deprecated)
        return [_to_dataset(r) for r in records]

    def count(self, tx: Transaction, project_id: str,
              user: User | None = None,
              include_deprecated: bool = False) -> int:
        _require_project(self.store, tx, project_id, user, write=False)
        return self.store.count_nodes(
            tx, DATASET, {"project": project_id},
            include_deprecated=include_deprecated)

    def delete(self, tx: Transaction, project_id: str, dataset_id: str,
               user: User | None = None) -> None:
        record = _require_dataset(self.store, tx, project_id, dataset_id,
                                  user, write=True)
        self.store.soft_delete(tx, record.id)

    def restore(self, tx: Transaction, project_id: str, dataset_id: str,
                user: User | None = None) -> None:
        _require_project(self.store, tx, project_id, user, write=True)
        record = _unique(self.store, tx, DATASET,
                         scope_key(project_id, dataset_id))
        if record is None:
            raise UnknownDatasetError(f"dataset {dataset_id!r} does not exist")
        self.store.restore(tx, record.id)


def _to_dataset(record: NodeRecord) -> Dataset:
    p = record.properties
    return Dataset(id=p["id"], project=p["project"], schema=p["schema"],
                   description=p["description"],
                   deprecated=bool(p.get(DEPRECATED)))


@dataclass(frozen=True, slots=True)
class ImportReport:
    created: int = 0
    updated: int = 0
    errors: tuple[tsv.RowError, ...] = field(default=())


class ProfileRepository:
    def __init__(self, store: GraphStore):
        self.store = store
        self._datasets = DatasetRepository(store)
        self._schemas = SchemaRepository(store)

    # -- single-profile operations ------------------------------------

    def save(self, tx: Transaction, project_id: str, dataset_id: str,
             profile: AllelicProfile, user: User | None = None) -> int:
        ds = _require_dataset(self.store, tx, project_id, dataset_id,
                              user, write=True)
        loci = self._schemas.loci(tx, ds.properties["schema"])
        check_id(profile.id, "profile id")
        if len(profile.alleles) != len(loci):
            raise SchemaMismatchError(len(loci), len(profile.alleles))
        for allele in profile.alleles:
            if allele is not None:
                check_id(allele, "allele id")
        return self._upsert(tx, ds, project_id, dataset_id, profile.id,
                            tuple(profile.alleles))

    def _upsert(self, tx: Transaction, ds: NodeRecord, project_id: str,
                dataset_id: str, profile_id: str,
                alleles: tuple[str | None, ...]) -> int:
        """Create or version a profile; returns the resulting version.

        An unchanged allele vector is a no-op (no version churn on
        re-import of the same table).
        """
        key = scope_key(project_id, dataset_id, profile_id)
        state = {"alleles": json.dumps(list(alleles))}
        existing = _unique(self.store, tx, PROFILE, key)
        if existing is None:
            create_versioned(tx, {PROFILE}, {
                "key": key,
                "id": profile_id,
                "dataset": scope_key(project_id, dataset_id),
                "frequency": 0,
            }, state)
            _bump_counts(self.store, tx, ds.id, total=1, active=1)
            return 1
        current = get_versioned(tx, existing.id)
        if current.properties == state and not current.deprecated:
            return current.version
        return put_versioned(tx, existing.id, state)

    def get(self, tx: Transaction, project_id: str, dataset_id: str,
            profile_id: str, version: int | None = None,
            user: User | None = None,
            include_deprecated: bool = False) -> AllelicProfile | None:
        _require_dataset(self.store, tx, project_id, dataset_id,
                         user, write=False)
        key = scope_key(project_id, dataset_id, profile_id)
        record = _unique(self.store, tx, PROFILE, key)
        if record is None:
            return None
        if record.properties.get(DEPRECATED) and not include_deprecated:
            return None
        return self._materialize(tx, record, version)

    def list(self, tx: Transaction, project_id: str, dataset_id: str,
             page: Page | None = None, user: User | None = None,
             include_deprecated: bool = False) -> list[AllelicProfile]:
        _require_dataset(self.store, tx, project_id, dataset_id,
                         user, write=False)
        records = self.store.match_nodes(
            tx, PROFILE, {"dataset": scope_key(project_id, dataset_id)},
            page=page, include_deprecated=include_deprecated)
        return [self._materialize(tx, r) for r in records]

    def count(self, tx: Transaction, project_id: str, dataset_id: str,
              user: User | None = None,
              include_deprecated: bool = False) -> int:
        ds = _require_dataset(self.store, tx, project_id, dataset_id,
                              user, write=False)
        field_name = "profile_count" if include_deprecated else "profile_count_active"
        return ds.properties[field_name]

    def delete(self, tx: Transaction, project_id: str, dataset_id: str,
               profile_id: str, user: User | None = None) -> None:
        ds = _require_dataset(self.store, tx, project_id, dataset_id,
                              user, write=True)
        record = _unique(self.store, tx, PROFILE,
                         scope_key(project_id, dataset_id, profile_id))
        if record is None or record.properties.get(DEPRECATED):
            raise UnknownProfileError(f"profile {profile_id!r} does not exist")
        self.store.soft_delete(tx, record.id)
        _bump_counts(self.store, tx, ds.id, total=0, active=-1)

    def restore(self, tx: Transaction, project_id: str, dataset_id: str,
                profile_id: str, user: User | None = None) -> None:
        ds = _require_dataset(self.store, tx, project_id, dataset_id,
                              user, write=True)
        record = _unique(self.store, tx, PROFILE,
                         scope_key(project_id, dataset_id, profile_id))
        if record is None:
            raise UnknownProfileError(f"profile {profile_id!r} does not exist")
        if record.properties.get(DEPRECATED):
            self.store.restore(tx, record.id)
            _bump_counts(self.store, tx, ds.id, total=0, active=1)

    def _materialize(self, tx: Transaction, record: NodeRecord,
                     version: int | None = None) -> AllelicProfile:
        st = get_versioned(tx, record.id, version)
        return AllelicProfile(
            id=record.properties["id"],
            alleles=tuple(json.loads(st.properties["alleles"])),
            frequency=record.properties["frequency"],
            version=st.version,
            deprecated=bool(record.properties.get(DEPRECATED)),
        )

    # -- bulk table operations -----------------------------------------

    def import_table(self, tx: Transaction, project_id: str, dataset_id: str,
                     text: str, user: User | None = None) -> ImportReport:
        """Upsert every well-formed row of a profile table.

        Row-level problems are collected, not fatal; a header that does not
        match the schema aborts the whole import. Rows identical to the
        stored current version count as neither created nor updated.
        """
        ds = _require_dataset(self.store, tx, project_id, dataset_id,
                              user, write=True)
        loci = self._schemas.loci(tx, ds.properties["schema"])
        table = tsv.parse_profiles(text, loci)
        created = updated = 0
        errors = list(table.errors)
        for row in table.rows:
            existing_version = self._current_version(
                tx, scope_key(project_id, dataset_id, row.id))
            try:
                new_version = self._upsert(tx, ds, project_id, dataset_id,
                                           row.id, row.alleles)
            except ValidationError as exc:
                errors.append(tsv.RowError(row.line, str(exc)))
                continue
            if existing_version is None:
                created += 1
            elif new_version != existing_version:
                updated += 1
        if ds.properties["id_header"] != table.id_header:
            props = dict(self.store.get_node(tx, ds.id).properties)
            props["id_header"] = table.id_header
            self.store.update_node(tx, ds.id, props)
        errors.sort(key=lambda e: e.line)
        return ImportReport(created, updated, tuple(errors))

    def _current_version(self, tx: Transaction, key: str) -> int | None:
        record = _unique(self.store, tx, PROFILE, key)
        if record is None:
            return None
        return record.properties["current_version"]

    def export_table(self, tx: Transaction, project_id: str, dataset_id: str,
                     user: User | None = None) -> str:
        ds = _require_dataset(self.store, tx, project_id, dataset_id,
                              user, write=False)
        loci = self._schemas.loci(tx, ds.properties["schema"])
        rows = []
        for record in self.store.match_nodes(
                tx, PROFILE, {"dataset": scope_key(project_id, dataset_id)}):
            st = get_versioned(tx, record.id)
            rows.append((record.properties["id"],
                         json.loads(st.properties["alleles"])))
        return tsv.format_profiles(ds.properties["id_header"], loci, rows)


def _bump_counts(store: GraphStore, tx: Transaction, dataset_node_id: int,
                 *, total: int, active: int) -> None:
    record = store.get_node(tx, dataset_node_id)
    props = dict(record.properties)
    props["profile_count"] += total
    props["profile_count_active"] += active
    store.update_node(tx, dataset_node_id, props)


class IsolateRepository:
    """Isolates carry the epidemiological attributes and the optional link
    to the profile that typed them. Linking is what drives a profile's
    frequency, so every state change that touches the link (save, link,
    soft delete, restore) adjusts the target profile's count here, in the
    same transaction."""

    def __init__(self, store: GraphStore):
        self.store = store
        ensure_indexes(store)

    def save(self, tx: Transaction, project_id: str, dataset_id: str,
             isolate: Isolate, user: User | None = None) -> int:
        _require_dataset(self.store, tx, project_id, dataset_id,
                         user, write=True)
        check_id(isolate.id, "isolate id")
        for k, v in isolate.ancillary.items():
            check_id(k, "ancillary key")
            if not isinstance(v, str):
                raise ValidationError("ancillary values must be strings")
        if isolate.profile is not None:
            self._require_profile(tx, project_id, dataset_id, isolate.profile)
        key = scope_key(project_id, dataset_id, isolate.id)
        state = {
            "profile": isolate.profile or "",
            "ancillary": json.dumps(dict(isolate.ancillary), sort_keys=True),
        }
        existing = _unique(self.store, tx, ISOLATE, key)
        if existing is None:
            create_versioned(tx, {ISOLATE}, {
                "key": key,
                "id": isolate.id,
                "dataset": scope_key(project_id, dataset_id),
            }, state)
            if isolate.profile is not None:
                self._bump_frequency(tx, project_id, dataset_id,
                                     isolate.profile, +1)
            return 1
        current = get_versioned(tx, existing.id)
        if current.properties == state and not current.deprecated:
            return current.version
        version = put_versioned(tx, existing.id, state)
        old_link = current.properties["profile"] or None
        if old_link != isolate.profile:
            if old_link is not None:
                self._bump_frequency(tx, project_id, dataset_id, old_link, -1)
            if isolate.profile is not None:
                self._bump_frequency(tx, project_id, dataset_id,
                                     isolate.profile, +1)
        return version

    def link(self, tx: Transaction, project_id: str, dataset_id: str,
             isolate_id: str, profile_id: str | None,
             profile_dataset: str | None = None,
             user: User | None = None) -> None:
        """Point an isolate at a profile (or at none, severing the link).

        The profile must live in the isolate's own dataset; naming any
        other dataset is refused outright.
        """
        if profile_dataset is not None and profile_dataset != dataset_id:
            raise CrossDatasetLinkError(
                f"cannot link across datasets ({dataset_id!r} vs "
                f"{profile_dataset!r})")
        current = self.get(tx, project_id, dataset_id, isolate_id, user=user)
        if current is None:
            raise UnknownIsolateError(f"isolate {isolate_id!r} does not exist")
        self.save(tx, project_id, dataset_id,
                  Isolate(id=isolate_id, profile=profile_id,
                          ancillary=dict(current.ancillary)),
                  user=user)

    def get(self, tx: Transaction, project_id: str, dataset_id: str,
            isolate_id: str, version: int | None = None,
            user: User | None = None,
            include_deprecated: bool = False) -> Isolate | None:
        _require_dataset(self.store, tx, project_id, dataset_id,
                         user, write=False)
        record = _unique(self.store, tx, ISOLATE,
                         scope_key(project_id, dataset_id, isolate_id))
        if record is None:
            return None
        if record.properties.get(DEPRECATED) and not include_deprecated:
            return None
        return self._materialize(tx, record, version)

    def list(self, tx: Transaction, project_id: str, dataset_id: str,
             page: Page | None = None, user: User | None = None,
             include_deprecated: bool = False) -> list[Isolate]:
        _require_dataset(self.store, tx, project_id, dataset_id,
                         user, write=False)
        records = self.store.match_nodes(
            tx, ISOLATE, {"dataset": scope_key(project_id, dataset_id)},
            page=page, include_deprecated=include_deprecated)
        return [self._materialize(tx, r) for r in records]

    def delete(self, tx: Transaction, project_id: str, dataset_id: str,
               isolate_id: str, user: User | None = None) -> None:
        _require_dataset(self.store, tx, project_id, dataset_id,
                         user, write=True)
        record = _unique(self.store, tx, ISOLATE,
                         scope_key(project_id, dataset_id, isolate_id))
        if record is None or record.properties.get(DEPRECATED):
            raise UnknownIsolateError(f"isolate {isolate_id!r} does not exist")
        linked = get_versioned(tx, record.id).properties["profile"] or None
        self.store.soft_delete(tx, record.id)
        if linked is not None:
            self._bump_frequency(tx, project_id, dataset_id, linked, -1)

    def restore(self, tx: Transaction, project_id: str, dataset_id: str,
                isolate_id: str, user: User | None = None) -> None:
        _require_dataset(self.store, tx, project_id, dataset_id,
                         user, write=True)
        record = _unique(self.store, tx, ISOLATE,
                         scope_key(project_id, dataset_id, isolate_id))
        if record is None:
            raise UnknownIsolateError(f"isolate {isolate_id!r} does not exist")
        if not record.properties.get(DEPRECATED):
            return
        self.store.restore(tx, record.id)
        linked = get_versioned(tx, record.id).properties["profile"] or None
        if linked is not None:
            self._bump_frequency(tx, project_id, dataset_id, linked, +1)

    def _materialize(self, tx: Transaction, record: NodeRecord,
                     version: int | None = None) -> Isolate:
        st = get_versioned(tx, record.id, version)
        return Isolate(
            id=record.properties["id"],
            profile=st.properties["profile"] or None,
            ancillary=json.loads(st.properties["ancillary"]),
            version=st.version,
            deprecated=bool(record.properties.get(DEPRECATED)),
        )

    def _require_profile(self, tx: Transaction, project_id: str,
                         dataset_id: str, profile_id: str) -> NodeRecord:
        record = _unique(self.store, tx, PROFILE,
                         scope_key(project_id, dataset_id, profile_id))
        if record is None or record.properties.get(DEPRECATED):
            raise UnknownProfileError(
                f"profile {profile_id!r} does not exist in dataset "
                f"{dataset_id!r}")
        return record

    def _bump_frequency(self, tx: Transaction, project_id: str,
                        dataset_id: str, profile_id: str, delta: int) -> None:
        record = _unique(self.store, tx, PROFILE,
                         scope_key(project_id, dataset_id, profile_id))
        if record is None:
            raise UnknownProfileError(
                f"profile {profile_id!r} does not exist in dataset "
                f"{dataset_id!r}")
        props = dict(record.properties)
        props["frequency"] += delta
        self.store.update_node(tx, record.id, props)


class AlleleRepository:
    def __init__(self, store: GraphStore):
        self.store = store
        ensure_indexes(store)

    def save(self, tx: Transaction, taxon: str, allele: Allele,
             user: User | None = None) -> int:
        check_id(taxon, "taxon")
        check_id(allele.locus, "locus id")
        check_id(allele.id, "allele id")
        if allele.sequence is not None:
            bad = set(allele.sequence) - _SEQUENCE_ALPHABET
            if not allele.sequence or bad:
                raise ValidationError(
                    "sequence must be a non-empty string over A/C/G/T/N")
        key = scope_key(taxon, allele.locus, allele.id)
        state = {"sequence": allele.sequence or ""}
        existing = _unique(self.store, tx, ALLELE, key)
        if existing is None:
            create_versioned(tx, {ALLELE}, {
                "key": key, "id": allele.id,
                "taxon": taxon, "locus": allele.locus,
            }, state)
            return 1
        current = get_versioned(tx, existing.id)
        if current.properties == state and not current.deprecated:
            return current.version
        return put_versioned(tx, existing.id, state)

    def get(self, tx: Transaction, taxon: str, locus: str, allele_id: str,
            version: int | None = None,
            include_deprecated: bool = False) -> Allele | None:
        record = _unique(self.store, tx, ALLELE,
                         scope_key(taxon, locus, allele_id))
        if record is None:
            return None
        if record.properties.get(DEPRECATED) and not include_deprecated:
            return None
        st = get_versioned(tx, record.id, version)
        return Allele(
            locus=locus,
            id=allele_id,
            sequence=st.properties["sequence"] or None,
            version=st.version,
            deprecated=bool(record.properties.get(DEPRECATED)),
        )


class UserRepository:
    def __init__(self, store: GraphStore):
        self.store = store
        ensure_indexes(store)

    def save(self, tx: Transaction, user: User) -> None:
        check_id(user.id, "user id")
        if user.role not in (ROLE_ADMIN, ROLE_USER):
            raise ValidationError(f"unknown role {user.role!r}")
        props = {"key": user.id, "id": user.id, "role": user.role,
                 DEPRECATED: False}
        existing = _unique(self.store, tx, USER, user.id)
        if existing is None:
            self.store.create_node(tx, {USER}, props)
        else:
            self.store.update_node(tx, existing.id, props)

    def get(self, tx: Transaction, user_id: str) -> User | None:
        record = _unique(self.store, tx, USER, user_id)
        if record is None or record.properties.get(DEPRECATED):
            return None
        return User(id=record.properties["id"], role=record.properties["role"])
