"""TSV codec for profile and isolate tables.

Profile tables are UTF-8, tab-separated, LF line endings: the first column
is the row id, the remaining columns are one allele identifier per schema
locus, in schema order. ``"0"`` or an empty field marks a missing allele
(MLST convention) and is written back out as ``"0"``. Isolate tables carry
the id column followed by ancillary keys named in the header.

Parsing is forgiving about row-level problems (reported with their line
number so a batch import can continue) but strict about the header: a
header that does not name the schema's loci in order aborts the parse.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import HeaderMismatchError

MISSING_FIELD = "0"


@dataclass(frozen=True, slots=True)
class RowError:
    line: int
    message: str


@dataclass(frozen=True, slots=True)
class ProfileRow:
    line: int
    id: str
    alleles: tuple[str | None, ...]


@dataclass(frozen=True, slots=True)
class ProfileTable:
    id_header: str
    rows: tuple[ProfileRow, ...]
    errors: tuple[RowError, ...]


def _decode_field(field: str) -> str | None:
    field = field.strip()
    return None if field in ("", MISSING_FIELD) else field


def _encode_field(allele: str | None) -> str:
    return MISSING_FIELD if allele is None else allele


def parse_profiles(text: str, loci: Sequence[str]) -> ProfileTable:
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise HeaderMismatchError("missing header row")
    header = lines[0].split("\t")
    if [h.strip() for h in header[1:]] != list(loci):
        raise HeaderMismatchError(
            f"header loci {header[1:]!r} do not match schema loci {list(loci)!r}")
    id_header = header[0].strip() or "id"

    rows: list[ProfileRow] = []
    errors: list[RowError] = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != len(loci) + 1:
            errors.append(RowError(
                lineno, f"expected {len(loci) + 1} fields, got {len(fields)}"))
            continue
        row_id = fields[0].strip()
        if not row_id:
            errors.append(RowError(lineno, "empty id"))
            continue
        rows.append(ProfileRow(
            lineno, row_id, tuple(_decode_field(f) for f in fields[1:])))
    return ProfileTable(id_header, tuple(rows), tuple(errors))


def format_profiles(id_header: str, loci: Sequence[str],
                    rows: Iterable[tuple[str, Sequence[str | None]]]) -> str:
    """Canonical table text: id-sorted rows, missing as "0", trailing LF."""
    out = ["\t".join([id_header, *loci])]
    for row_id, alleles in sorted(rows, key=lambda r: r[0]):
        out.append("\t".join([row_id, *(_encode_field(a) for a in alleles)]))
    return "\n".join(out) + "\n"


@dataclass(frozen=True, slots=True)
class IsolateRow:
    line: int
    id: str
    ancillary: dict[str, str]


@dataclass(frozen=True, slots=True)
class IsolateTable:
    id_header: str
    keys: tuple[str, ...]
    rows: tuple[IsolateRow, ...]
    errors: tuple[RowError, ...]


def parse_isolates(text: str) -> IsolateTable:
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise HeaderMismatchError("missing header row")
    header = [h.strip() for h in lines[0].split("\t")]
    id_header, keys = header[0] or "id", tuple(header[1:])
    if len(set(keys)) != len(keys):
        raise HeaderMismatchError("duplicate ancillary keys in header")

    rows: list[IsolateRow] = []
    errors: list[RowError] = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != len(keys) + 1:
            errors.append(RowError(
                lineno, f"expected {len(keys) + 1} fields, got {len(fields)}"))
            continue
        row_id = fields[0].strip()
        if not row_id:
            errors.append(RowError(lineno, "empty id"))
            continue
        ancillary = {k: v.strip() for k, v in zip(keys, fields[1:]) if v.strip()}
        rows.append(IsolateRow(lineno, row_id, ancillary))
    return IsolateTable(id_header, keys, tuple(rows), tuple(errors))


def format_isolates(id_header: str, keys: Sequence[str],
                    rows: Iterable[tuple[str, dict[str, str]]]) -> str:
    out = ["\t".join([id_header, *keys])]
    for row_id, ancillary in sorted(rows, key=lambda r: r[0]):
        out.append("\t".join([row_id, *(ancillary.get(k, "") for k in keys)]))
    return "\n".join(out) + "\n"
