"""Taxonomy schema: dimensions contain categories contain characteristics.

The hierarchy is exactly two levels below a dimension. Ids ("d1",
"cat1.2", "c1.2.1") are opaque stable keys: renames change names, never
ids. All values are immutable; every operation here is pure.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cache
from importlib import resources
from typing import Iterator, Literal

from . import canonical

ValidationMode = Literal["strict", "descriptive"]
NodeKind = Literal["dimension", "category", "characteristic"]


class TaxonomyDataError(ValueError):
    """Bundled or user taxonomy data cannot be parsed into a taxonomy."""


@dataclass(frozen=True)
class Characteristic:
    id: str
    name: str
    description: str = ""


@dataclass(frozen=True)
class Category:
    id: str
    name: str
    characteristics: tuple[Characteristic, ...]


@dataclass(frozen=True)
class Dimension:
    id: str
    name: str
    question: str
    categories: tuple[Category, ...]


@dataclass(frozen=True)
class Taxonomy:
    version_label: str
    meta_characteristic: str
    dimensions: tuple[Dimension, ...]

    def dimension(self, dim_id: str) -> Dimension:
        for d in self.dimensions:
            if d.id == dim_id:
                return d
        raise KeyError(dim_id)

    def iter_nodes(self) -> Iterator[tuple[NodeKind, str, str, str | None]]:
        """Yield (kind, id, name, parent_id) for every node."""
        for d in self.dimensions:
            yield "dimension", d.id, d.name, None
            for c in d.categories:
                yield "category", c.id, c.name, d.id
                for ch in c.characteristics:
                    yield "characteristic", ch.id, ch.name, c.id

    def characteristic_ids(self) -> list[str]:
        return [i for kind, i, _, _ in self.iter_nodes() if kind == "characteristic"]

    def pair_index(self) -> dict[str, dict[str, set[str]]]:
        """dimension id -> category id -> set of characteristic ids."""
        index: dict[str, dict[str, set[str]]] = {}
        for d in self.dimensions:
            index[d.id] = {c.id: {ch.id for ch in c.characteristics} for c in d.categories}
        return index


# --- violations & validation -------------------------------------------------

@dataclass(frozen=True)
class Violation:
    rule: str
    path: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[Violation, ...]


def validate_taxonomy(taxonomy: Taxonomy, mode: ValidationMode = "strict") -> ValidationReport:
    """Check structural constraints; every problem is a report entry.

    Strict mode enforces the minimum-size rules (a dimension needs two or
    more categories, a category two or more characteristics) on top of the
    uniqueness rules. Descriptive mode enforces only uniqueness and flags
    empty containers.
    """
    if mode not in ("strict", "descriptive"):
        raise ValueError(f"unknown validation mode: {mode!r}")
    violations: list[Violation] = []

    if not taxonomy.dimensions:
        violations.append(Violation("taxonomy-empty", "", "taxonomy has no dimensions"))

    seen_ids: dict[str, str] = {}
    for kind, node_id, _, parent in taxonomy.iter_nodes():
        path = node_id if parent is None else f"{parent}/{node_id}"
        if node_id in seen_ids:
            violations.append(
                Violation("id-duplicate", path, f"id {node_id!r} already used at {seen_ids[node_id]}")
            )
        else:
            seen_ids[node_id] = path

    _check_name_uniqueness(
        "dim-name-duplicate", "", ((d.id, d.name) for d in taxonomy.dimensions), violations
    )
    for d in taxonomy.dimensions:
        _check_name_uniqueness(
            "cat-name-duplicate", d.id, ((c.id, c.name) for c in d.categories), violations
        )
        if mode == "strict" and len(d.categories) < 2:
            violations.append(
                Violation("dim-min-categories", d.id, f"dimension {d.name!r} has {len(d.categories)} categories, needs >= 2")
            )
        if mode == "descriptive" and not d.categories:
            violations.append(Violation("dim-empty", d.id, f"dimension {d.name!r} has no categories"))
        for c in d.categories:
            cat_path = f"{d.id}/{c.id}"
            _check_name_uniqueness(
                "char-name-duplicate", cat_path, ((ch.id, ch.name) for ch in c.characteristics), violations
            )
            if mode == "strict" and len(c.characteristics) < 2:
                violations.append(
                    Violation("cat-min-characteristics", cat_path, f"category {c.name!r} has {len(c.characteristics)} characteristics, needs >= 2")
                )
            if mode == "descriptive" and not c.characteristics:
                violations.append(Violation("cat-empty", cat_path, f"category {c.name!r} has no characteristics"))

    ordered = tuple(sorted(violations, key=lambda v: (v.path, v.rule)))
    return ValidationReport(ok=not ordered, violations=ordered)


def _check_name_uniqueness(rule, scope, pairs, violations):
    seen: dict[str, str] = {}
    for node_id, name in pairs:
        path = f"{scope}/{node_id}" if scope else node_id
        if name in seen:
            violations.append(Violation(rule, path, f"name {name!r} already used by {seen[name]}"))
        else:
            seen[name] = node_id


# --- diffing ------------------------------------------------------------------

@dataclass(frozen=True)
class DiffEntry:
    kind: NodeKind
    id: str
    name: str
    parent: str | None


@dataclass(frozen=True)
class RenameEntry:
    kind: NodeKind
    id: str
    old_name: str
    new_name: str


@dataclass(frozen=True)
class MoveEntry:
    kind: NodeKind
    id: str
    old_parent: str | None
    new_parent: str | None


@dataclass(frozen=True)
class TaxonomyDiff:
    added: tuple[DiffEntry, ...] = ()
    removed: tuple[DiffEntry, ...] = ()
    renamed: tuple[RenameEntry, ...] = ()
    moved: tuple[MoveEntry, ...] = ()

    @property
    def empty(self) -> bool:
        return not (self.added or self.removed or self.renamed or self.moved)


def diff_taxonomies(a: Taxonomy, b: Taxonomy) -> TaxonomyDiff:
    """Structural diff keyed by id.

    A rename is the same id with a different name; a move is the same id
    under a different parent. Descriptions and ordering are not structural
    and never appear in the diff.
    """
    flat_a = {i: (kind, name, parent) for kind, i, name, parent in a.iter_nodes()}
    flat_b = {i: (kind, name, parent) for kind, i, name, parent in b.iter_nodes()}

    added = [
        DiffEntry(kind, i, name, parent)
        for i, (kind, name, parent) in flat_b.items()
        if i not in flat_a
    ]
    removed = [
        DiffEntry(kind, i, name, parent)
        for i, (kind, name, parent) in flat_a.items()
        if i not in flat_b
    ]
    renamed = []
    moved = []
    for i, (kind, name_a, parent_a) in flat_a.items():
        if i not in flat_b:
            continue
        _, name_b, parent_b = flat_b[i]
        if name_a != name_b:
            renamed.append(RenameEntry(kind, i, name_a, name_b))
        if parent_a != parent_b:
            moved.append(MoveEntry(kind, i, parent_a, parent_b))

    key = lambda e: e.id  # noqa: E731
    return TaxonomyDiff(
        added=tuple(sorted(added, key=key)),
        removed=tuple(sorted(removed, key=key)),
        renamed=tuple(sorted(renamed, key=key)),
        moved=tuple(sorted(moved, key=key)),
    )


# --- (de)serialization ----------------------------------------------------------

def taxonomy_to_dict(t: Taxonomy) -> dict:
    return {
        "version_label": t.version_label,
        "meta_characteristic": t.meta_characteristic,
        "dimensions": [
            {
                "id": d.id,
                "name": d.name,
                "question": d.question,
                "categories": [
                    {
                        "id": c.id,
                        "name": c.name,
                        "characteristics": [
                            {"id": ch.id, "name": ch.name, "description": ch.description}
                            for ch in c.characteristics
                        ],
                    }
                    for c in d.categories
                ],
            }
            for d in t.dimensions
        ],
    }


def taxonomy_from_dict(doc: dict) -> Taxonomy:
    try:
        dimensions = tuple(
            Dimension(
                id=d["id"],
                name=d["name"],
                question=d.get("question", ""),
                categories=tuple(
                    Category(
                        id=c["id"],
                        name=c["name"],
                        characteristics=tuple(
                            Characteristic(
                                id=ch["id"], name=ch["name"], description=ch.get("description", "")
                            )
                            for ch in c["characteristics"]
                        ),
                    )
                    for c in d["categories"]
                ),
            )
            for d in doc["dimensions"]
        )
        return Taxonomy(
            version_label=doc["version_label"],
            meta_characteristic=doc["meta_characteristic"],
            dimensions=dimensions,
        )
    except (KeyError, TypeError) as exc:
        raise TaxonomyDataError(f"malformed taxonomy document: {exc}") from exc


def serialize_taxonomy(t: Taxonomy) -> str:
    """Canonical JSON text for a taxonomy (the interchange file format)."""
    return canonical.dumps(taxonomy_to_dict(t))


def parse_taxonomy(text: str | bytes) -> Taxonomy:
    return taxonomy_from_dict(canonical.loads(text))


_BUNDLED_RESOURCE = "automl_taxonomy.json"


@cache
def load_bundled_taxonomy() -> Taxonomy:
    """Load the shipped AutoML artifact taxonomy (4 dimensions: Source,
    Transmission Mode, Artifact Format, Task). Cached; the value is frozen."""
    try:
        text = resources.files("tracelift.data").joinpath(_BUNDLED_RESOURCE).read_text("utf-8")
        return parse_taxonomy(text)
    except (OSError, ValueError, KeyError) as exc:
        raise TaxonomyDataError(f"bundled taxonomy is corrupt: {exc}") from exc
