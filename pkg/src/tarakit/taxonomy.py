"""The 23-category attack-record taxonomy, its store, and CVE lookup.

Each record describes one known attack across 23 categories. Every category
holds up to three abstraction levels, level 1 the most abstract; a deeper
level may only be present when the one above it is. Records are persisted
one JSON object per line, which keeps the store append-friendly and
diff-friendly.

A handful of categories carry controlled vocabularies that tie the taxonomy
back to the assessment engine: attack classes and violated properties reuse
the STRIDE and security-property enumerations, exploitability holds a
feasibility class, and the rating embeds an impact class with an optional
1-5 risk value at level 2. Everything else is free text, with ``unknown``
as the explicit marker for missing knowledge.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Mapping, Protocol

from .errors import Violation
from .feasibility import FeasibilityClass
from .impact import ImpactClass
from .stride import CybersecurityProperty, StrideCategory

#: The 23 record categories, in canonical order.
RECORD_FIELDS: tuple[str, ...] = (
    "description",
    "source_reference",
    "year",
    "attack_class",
    "attack_base",
    "attack_type",
    "violated_property",
    "affected_asset",
    "vulnerability",
    "interface",
    "consequences",
    "attack_path",
    "requirement",
    "restrictions",
    "attack_level",
    "acquired_privileges",
    "vehicle",
    "component",
    "tools",
    "motivation",
    "vulnerability_db_entry",
    "exploitability",
    "rating",
)

ATTACK_TYPES = ("analysis", "simulation", "real-attack")

_YEAR_PATTERN = re.compile(r"^\d{4}$")
_RISK_VALUES = ("1", "2", "3", "4", "5")

Levels = tuple  # up to three abstraction-level values, most abstract first


class TaxonomyFormatError(ValueError):
    """A record line or record document is not well formed."""


@dataclass(frozen=True)
class AttackRecord:
    """One recorded attack. Every field holds a levels tuple or None.

    ``None`` means the category is absent entirely, which
    :func:`validate_record` reports; an unknown value is spelled
    ``("unknown",)``.
    """

    description: Levels | None = None
    source_reference: Levels | None = None
    year: Levels | None = None
    attack_class: Levels | None = None
    attack_base: Levels | None = None
    attack_type: Levels | None = None
    violated_property: Levels | None = None
    affected_asset: Levels | None = None
    vulnerability: Levels | None = None
    interface: Levels | None = None
    consequences: Levels | None = None
    attack_path: Levels | None = None
    requirement: Levels | None = None
    restrictions: Levels | None = None
    attack_level: Levels | None = None
    acquired_privileges: Levels | None = None
    vehicle: Levels | None = None
    component: Levels | None = None
    tools: Levels | None = None
    motivation: Levels | None = None
    vulnerability_db_entry: Levels | None = None
    exploitability: Levels | None = None
    rating: Levels | None = None

    def __post_init__(self) -> None:
        for spec in fields(self):
            value = getattr(self, spec.name)
            if value is None:
                continue
            if isinstance(value, str):
                value = (value,)
            else:
                value = tuple(value)
            object.__setattr__(self, spec.name, value)

    def get(self, field_name: str) -> Levels | None:
        if field_name not in RECORD_FIELDS:
            raise KeyError(f"unknown record field {field_name!r}")
        return getattr(self, field_name)


_VOCABULARIES: dict[str, tuple[str, ...]] = {
    "attack_type": ATTACK_TYPES,
    "attack_class": tuple(c.value for c in StrideCategory) + ("unknown",),
    "violated_property": tuple(p.value for p in CybersecurityProperty) + ("unknown",),
    "exploitability": tuple(f.value for f in FeasibilityClass) + ("unknown",),
    "rating": tuple(i.value for i in ImpactClass) + ("unknown",),
}


def validate_record(record: AttackRecord) -> list[Violation]:
    """All invariant violations of one record; each names its field."""
    violations: list[Violation] = []
    for name in RECORD_FIELDS:
        raw = record.get(name)
        levels = _trim_trailing_nones(raw) if raw is not None else None
        if levels is None or len(levels) == 0:
            violations.append(Violation(name, "category is missing"))
            continue
        if len(levels) > 3:
            violations.append(Violation(name, "a category holds at most three abstraction levels"))
            continue
        broken = False
        for depth in range(1, len(levels)):
            if levels[depth] is not None and levels[depth - 1] is None:
                violations.append(Violation(name, f"level {depth + 1} present without level {depth}"))
                broken = True
        for depth, value in enumerate(levels, start=1):
            if value is not None and (not isinstance(value, str) or not value):
                violations.append(Violation(name, f"level {depth} must be a nonempty string"))
                broken = True
        if broken or not isinstance(levels[0], str):
            continue
        if name in _VOCABULARIES and levels[0] not in _VOCABULARIES[name]:
            allowed = ", ".join(_VOCABULARIES[name])
            violations.append(Violation(name, f"level 1 must be one of {allowed}, got {levels[0]!r}"))
        if name == "year" and not _YEAR_PATTERN.match(levels[0]):
            violations.append(Violation(name, f"level 1 must be a four-digit year, got {levels[0]!r}"))
        if name == "rating" and len(levels) > 1 and levels[1] not in _RISK_VALUES:
            violations.append(Violation(name, f"level 2 must be a risk value 1..5, got {levels[1]!r}"))
    return violations


def _trim_trailing_nones(levels: Levels) -> Levels:
    out = tuple(levels)
    while out and out[-1] is None:
        out = out[:-1]
    return out


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def record_to_dict(record: AttackRecord) -> dict[str, list[str]]:
    """Canonical dict form: present categories in canonical order, trailing
    unset levels trimmed."""
    out: dict[str, list[str]] = {}
    for name in RECORD_FIELDS:
        levels = record.get(name)
        if levels is not None:
            out[name] = list(_trim_trailing_nones(levels))
    return out


def record_from_dict(data: Mapping[str, Any]) -> AttackRecord:
    unknown = sorted(set(data) - set(RECORD_FIELDS))
    if unknown:
        raise TaxonomyFormatError(f"unknown record categories: {', '.join(unknown)}")
    kwargs: dict[str, Levels] = {}
    for name, raw in data.items():
        if raw is None:
            continue
        if isinstance(raw, str):
            kwargs[name] = (raw,)
        elif isinstance(raw, list):
            kwargs[name] = tuple(raw)
        else:
            raise TaxonomyFormatError(f"{name}: expected a string or a list of level values")
    return AttackRecord(**kwargs)


def serialize_record(record: AttackRecord) -> str:
    """One normalized JSON line, no trailing newline."""
    return json.dumps(record_to_dict(record), separators=(", ", ": "))


def parse_record(line: str) -> AttackRecord:
    try:
        data = json.loads(line)
    except json.JSONDecodeError as exc:
        raise TaxonomyFormatError(f"record line is not valid JSON: {exc.msg}") from None
    if not isinstance(data, Mapping):
        raise TaxonomyFormatError("record line must hold a JSON object")
    return record_from_dict(data)


# ---------------------------------------------------------------------------
# Store
# ---------------------------------------------------------------------------

class StoreError(Exception):
    """Storage I/O failed; the message names the store path."""


class RecordStore:
    """Append-only attack-record store, one record per line.

    One writer and any number of readers may work concurrently: records are
    written as whole lines and readers ignore a trailing partial line, so a
    reader always sees a consistent prefix of the store.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)

    def append(self, record: AttackRecord) -> None:
        try:
            with self.path.open("a", encoding="utf-8") as handle:
                handle.write(serialize_record(record) + "\n")
                handle.flush()
        except OSError as exc:
            raise StoreError(f"cannot append to store {self.path}: {exc}") from exc

    def records(self) -> list[AttackRecord]:
        """All complete records, insertion order. A missing file is an
        empty store."""
        if not self.path.exists():
            return []
        try:
            raw = self.path.read_text(encoding="utf-8")
        except OSError as exc:
            raise StoreError(f"cannot read store {self.path}: {exc}") from exc
        records = []
        # A file not ending in a newline may hold a record mid-write; that
        # trailing fragment is not part of the consistent prefix and is
        # ignored here.
        complete = raw.split("\n")[:-1]
        for number, line in enumerate(complete, start=1):
            if not line.strip():
                continue
            try:
                records.append(parse_record(line))
            except TaxonomyFormatError as exc:
                raise StoreError(f"store {self.path} line {number}: {exc}") from None
        return records

    def query(
        self,
        equals: Mapping[str, str] | None = None,
        contains: Mapping[str, str] | None = None,
    ) -> list[AttackRecord]:
        """Records matching every predicate, insertion order.

        ``equals`` matches when any abstraction level of the field equals the
        value; ``contains`` when any level contains it as a substring.
        """
        for name in list(equals or ()) + list(contains or ()):
            if name not in RECORD_FIELDS:
                raise KeyError(f"unknown record field {name!r}")
        out = []
        for record in self.records():
            if _matches(record, equals or {}, contains or {}):
                out.append(record)
        return out


def _matches(record: AttackRecord, equals: Mapping[str, str], contains: Mapping[str, str]) -> bool:
    for name, value in equals.items():
        levels = record.get(name) or ()
        if not any(level == value for level in levels):
            return False
    for name, value in contains.items():
        levels = record.get(name) or ()
        if not any(isinstance(level, str) and value in level for level in levels):
            return False
    return True


# ---------------------------------------------------------------------------
# CVE lookup
# ---------------------------------------------------------------------------

CVE_ID_PATTERN = re.compile(r"^CVE-\d{4}-\d{4,}$")


class MalformedCveIdError(ValueError):
    """The requested id does not follow the CVE identifier pattern."""


class CveLookupError(Exception):
    """The lookup client failed; distinct from a clean not-found answer."""


@dataclass(frozen=True)
class CveRef:
    """One vulnerability-database entry: identifier, description, source."""

    id: str
    description: str
    source: str

    def __post_init__(self) -> None:
        if not CVE_ID_PATTERN.match(self.id):
            raise MalformedCveIdError(f"not a CVE identifier: {self.id!r}")


class CveClient(Protocol):
    def fetch(self, cve_id: str) -> CveRef | None:
        """Return the entry, or None when the id is unknown. Raise
        :class:`CveLookupError` on transport or data failures."""
        ...


class FixtureCveClient:
    """Offline client reading one JSON file per CVE id from a directory.

    The shipped default for builds without network access; swap in any other
    :class:`CveClient` to reach a live database.
    """

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)

    def fetch(self, cve_id: str) -> CveRef | None:
        path = self.directory / f"{cve_id}.json"
        if not path.exists():
            return None
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
            ref = CveRef(id=data["id"], description=data["description"], source=data["source"])
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise CveLookupError(f"cannot read CVE fixture {path}: {exc}") from exc
        if ref.id != cve_id:
            raise CveLookupError(f"CVE fixture {path} holds {ref.id}, expected {cve_id}")
        return ref


def lookup_cve(cve_id: str, client: CveClient) -> CveRef | None:
    """Look up one CVE id through the injected client.

    A well-formed id that is simply unknown yields None; a malformed id is
    rejected before the client is consulted.
    """
    if not CVE_ID_PATTERN.match(cve_id):
        raise MalformedCveIdError(f"not a CVE identifier: {cve_id!r}")
    return client.fetch(cve_id)
