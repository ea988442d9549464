"""Captured artifacts: the type catalog, per-artifact classification under
the active taxonomy, and creation provenance.

A classification maps dimension id -> set of (category id, characteristic
id) pairs. Strict mode demands exactly one pair per dimension; descriptive
mode allows several. Partial classifications (some dimensions unassigned)
are permitted only where explicitly requested — freshly demarcated captures
are classified later.
"""

from __future__ import annotations

import time
import uuid
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from typing import Literal, Mapping

from . import canonical
from .taxonomy import Taxonomy


class Phase(str, Enum):
    PREPARATION = "preparation"
    ANALYSIS = "analysis"
    DEPLOYMENT = "deployment"
    COMMUNICATION = "communication"
    INTERACTIVE = "interactive"


class Origin(str, Enum):
    HUMAN = "human"
    MACHINE = "machine"


CaptureMethod = Literal["api-dump", "manual-annotation", "screenshot"]
CAPTURE_METHODS: tuple[str, ...] = ("api-dump", "manual-annotation", "screenshot")

# dimension id -> frozenset of (category id, characteristic id)
Classification = dict[str, frozenset[tuple[str, str]]]


class ClassificationError(ValueError):
    """A classification failed validation; ``code`` is machine-readable."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


class CatalogError(ValueError):
    pass


@dataclass(frozen=True)
class ArtifactGroup:
    id: str
    name: str
    phase: Phase


@dataclass(frozen=True)
class ArtifactType:
    id: str
    name: str
    group: str
    default_classification: Classification | None = None


@dataclass(frozen=True)
class Provenance:
    created_at: int  # unix epoch milliseconds, UTC
    generator: Origin
    actor_label: str
    capture_method: str

    def __post_init__(self):
        if self.capture_method not in CAPTURE_METHODS:
            raise ValueError(f"unknown capture method: {self.capture_method!r}")
        if not isinstance(self.created_at, int) or self.created_at < 0:
            raise ValueError(f"created_at must be a non-negative epoch-ms int, got {self.created_at!r}")


@dataclass(frozen=True)
class ArtifactRecord:
    artifact_id: str
    type_id: str
    title: str
    classification: Classification
    provenance: Provenance
    payload_ref: str | None = None
    notes: str = ""


def now_ms() -> int:
    return int(time.time() * 1000)


def new_artifact_id() -> str:
    return str(uuid.uuid4())


# --- classification ----------------------------------------------------------

def classification_from_dict(doc: Mapping[str, object]) -> Classification:
    out: Classification = {}
    for dim_id, pairs in doc.items():
        if not isinstance(pairs, (list, tuple)):
            raise ClassificationError("malformed", f"assignments for {dim_id!r} must be a list of pairs")
        converted = set()
        for pair in pairs:
            if not (isinstance(pair, (list, tuple)) and len(pair) == 2):
                raise ClassificationError("malformed", f"bad pair {pair!r} under {dim_id!r}")
            converted.add((str(pair[0]), str(pair[1])))
        out[str(dim_id)] = frozenset(converted)
    return out


def classification_to_dict(c: Classification) -> dict[str, list[list[str]]]:
    """Plain-data form with deterministic ordering, ready for canonical JSON."""
    return {dim: [list(p) for p in sorted(pairs)] for dim, pairs in sorted(c.items())}


def validate_classification(
    c: Classification,
    taxonomy: Taxonomy,
    mode: str = "descriptive",
    *,
    allow_partial: bool = False,
) -> None:
    """Raise ClassificationError unless ``c`` is well-formed under ``taxonomy``.

    allow_partial skips the every-dimension-assigned requirement; assigned
    dimensions are still checked in full.
    """
    if mode not in ("strict", "descriptive"):
        raise ValueError(f"unknown classification mode: {mode!r}")
    index = taxonomy.pair_index()

    for dim_id, pairs in c.items():
        if dim_id not in index:
            raise ClassificationError("unknown-id", f"dimension {dim_id!r} not in active taxonomy")
        if not pairs:
            raise ClassificationError("empty-assignment", f"dimension {dim_id!r} assigned an empty set")
        for cat_id, char_id in pairs:
            cats = index[dim_id]
            if cat_id not in cats:
                raise ClassificationError(
                    "hierarchy-mismatch",
                    f"category {cat_id!r} does not belong to dimension {dim_id!r}",
                )
            if char_id not in cats[cat_id]:
                raise ClassificationError(
                    "hierarchy-mismatch",
                    f"characteristic {char_id!r} does not belong to category {cat_id!r}",
                )
        if mode == "strict" and len(pairs) != 1:
            raise ClassificationError(
                "strict-multiplicity",
                f"strict mode allows exactly one pair per dimension; {dim_id!r} has {len(pairs)}",
            )

    if not allow_partial:
        for dim in taxonomy.dimensions:
            if dim.id not in c:
                raise ClassificationError(
                    "dimension-unassigned", f"dimension {dim.id!r} ({dim.name}) has no assignment"
                )


SOURCE_DIMENSION_ID = "d1"
DATA_CATEGORY_ID = "cat1.2"

_CATEGORY_ORIGIN: dict[str, Origin] = {
    "cat1.1": Origin.HUMAN,  # Human
    "cat1.5": Origin.HUMAN,  # Organizational Process
    "cat1.3": Origin.MACHINE,  # AutoML Process
    "cat1.4": Origin.MACHINE,  # System
}

DEFAULT_DATA_ORIGIN_RULE: dict[str, Origin] = {
    "c1.2.1": Origin.HUMAN,  # initial data enters the workflow from outside
    "c1.2.2": Origin.MACHINE,  # derived data is computed
}


def derive_origin(
    c: Classification,
    data_origin_rule: Mapping[str, Origin] | None = None,
) -> Origin:
    """Collapse the Source assignments of a classification to human/machine.

    Individual and organizational sources count as human; automated-process
    and system sources count as machine. Data is split by characteristic via
    ``data_origin_rule`` (repository-configurable). When the assignments
    disagree, machine wins: any automated involvement makes the artifact
    machine-origin.
    """
    rule = DEFAULT_DATA_ORIGIN_RULE if data_origin_rule is None else dict(data_origin_rule)
    pairs = c.get(SOURCE_DIMENSION_ID)
    if not pairs:
        raise ClassificationError(
            "dimension-unassigned", "cannot derive origin: Source dimension unassigned"
        )
    origins: set[Origin] = set()
    for cat_id, char_id in pairs:
        if cat_id == DATA_CATEGORY_ID:
            if char_id not in rule:
                raise ClassificationError(
                    "unknown-id", f"no origin rule for data characteristic {char_id!r}"
                )
            origins.add(rule[char_id])
        elif cat_id in _CATEGORY_ORIGIN:
            origins.add(_CATEGORY_ORIGIN[cat_id])
        else:
            raise ClassificationError(
                "unknown-id", f"no origin mapping for source category {cat_id!r}"
            )
    return Origin.MACHINE if Origin.MACHINE in origins else Origin.HUMAN


# --- catalog ------------------------------------------------------------------

_CATALOG_RESOURCE = "artifact_catalog.json"


def load_artifact_catalog() -> tuple[tuple[ArtifactGroup, ...], tuple[ArtifactType, ...]]:
    """Load the shipped group/type catalog (11 groups spanning 5 phases,
    52 artifact types)."""
    try:
        text = resources.files("tracelift.data").joinpath(_CATALOG_RESOURCE).read_text("utf-8")
        doc = canonical.loads(text)
        groups = tuple(
            ArtifactGroup(id=g["id"], name=g["name"], phase=Phase(g["phase"])) for g in doc["groups"]
        )
        group_ids = {g.id for g in groups}
        types = []
        for t in doc["types"]:
            default = t.get("default_classification")
            types.append(
                ArtifactType(
                    id=t["id"],
                    name=t["name"],
                    group=t["group"],
                    default_classification=(
                        classification_from_dict(default) if default is not None else None
                    ),
                )
            )
        for t in types:
            if t.group not in group_ids:
                raise CatalogError(f"type {t.id!r} references unknown group {t.group!r}")
        return groups, tuple(types)
    except (OSError, KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, CatalogError):
            raise
        raise CatalogError(f"bundled artifact catalog is corrupt: {exc}") from exc


def new_artifact_record(
    type_id: str,
    title: str,
    classification: Classification,
    provenance: Provenance,
    taxonomy: Taxonomy,
    types_by_id: Mapping[str, ArtifactType],
    *,
    mode: str = "descriptive",
    allow_partial: bool = False,
    payload_ref: str | None = None,
    notes: str = "",
    artifact_id: str | None = None,
) -> ArtifactRecord:
    """Validate inputs and build a record with a fresh id.

    Pure except for id generation; persistence is the store's job.
    """
    if type_id not in types_by_id:
        raise ClassificationError("unknown-type", f"artifact type {type_id!r} not in catalog")
    validate_classification(classification, taxonomy, mode, allow_partial=allow_partial)
    return ArtifactRecord(
        artifact_id=artifact_id if artifact_id is not None else new_artifact_id(),
        type_id=type_id,
        title=title,
        classification=classification,
        provenance=provenance,
        payload_ref=payload_ref,
        notes=notes,
    )


def content_fingerprint(title: str, classification: Classification, payload_ref: str | None) -> str:
    """Stable hash of the version-relevant content of a record.

    Anything that makes one version differ from another feeds in here:
    the title, the classification snapshot, and the payload blob hash.
    """
    return canonical.hash_value(
        {
            "classification": classification_to_dict(classification),
            "payload_ref": payload_ref,
            "title": title,
        }
    )


# --- (de)serialization ----------------------------------------------------------

def provenance_to_dict(p: Provenance) -> dict:
    return {
        "actor_label": p.actor_label,
        "capture_method": p.capture_method,
        "created_at": p.created_at,
        "generator": p.generator.value,
    }


def provenance_from_dict(doc: Mapping[str, object]) -> Provenance:
    return Provenance(
        created_at=int(doc["created_at"]),  # type: ignore[arg-type]
        generator=Origin(doc["generator"]),
        actor_label=str(doc["actor_label"]),
        capture_method=str(doc["capture_method"]),
    )


def record_to_dict(r: ArtifactRecord) -> dict:
    return {
        "artifact_id": r.artifact_id,
        "classification": classification_to_dict(r.classification),
        "notes": r.notes,
        "payload_ref": r.payload_ref,
        "provenance": provenance_to_dict(r.provenance),
        "title": r.title,
        "type_id": r.type_id,
    }


def record_from_dict(doc: Mapping[str, object]) -> ArtifactRecord:
    return ArtifactRecord(
        artifact_id=str(doc["artifact_id"]),
        type_id=str(doc["type_id"]),
        title=str(doc["title"]),
        classification=classification_from_dict(doc["classification"]),  # type: ignore[arg-type]
        provenance=provenance_from_dict(doc["provenance"]),  # type: ignore[arg-type]
        payload_ref=doc.get("payload_ref"),  # type: ignore[union-attr,arg-type]
        notes=str(doc.get("notes", "")),  # type: ignore[union-attr]
    )
