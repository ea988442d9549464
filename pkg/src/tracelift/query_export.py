"""Read-side queries and the view-bundle export.

Everything here is a pure function of replayed repository state: locate
(conjunctive filtering), summarize (info card with peers), compare_history
(field-level version delta), and export_view_bundle (the canonical-JSON
document the explorer UI consumes, schema "tracelift-view/1"). Exports are
deterministic: the same repository state produces byte-identical files.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from . import canonical
from .artifact import (
    ArtifactGroup,
    ArtifactType,
    Classification,
    ClassificationError,
    Origin,
    Phase,
    classification_to_dict,
    derive_origin,
    load_artifact_catalog,
)
from .store import RepoState, Repository, replay
from .tracegraph import ArtifactVersion, VersionStatus

SCHEMA_VERSION = "tracelift-view/1"
EXPORT_NAME = "view-bundle.json"

_PHASE_RANK = {
    Phase.PREPARATION: 0,
    Phase.ANALYSIS: 1,
    Phase.DEPLOYMENT: 2,
    Phase.COMMUNICATION: 3,
}


class QueryError(ValueError):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class Filter:
    """Conjunctive constraints; None means unconstrained."""

    phase: Phase | None = None
    group: str | None = None
    type_id: str | None = None
    origin: Origin | None = None
    dimension: str | None = None
    category: str | None = None
    characteristic: str | None = None
    rev_min: int | None = None
    rev_max: int | None = None


@dataclass(frozen=True)
class ArtifactSummary:
    artifact_id: str
    title: str
    type_id: str
    group_id: str
    phase: Phase
    origin: Origin | None
    seq: int


@dataclass(frozen=True)
class InfoCard:
    summary: ArtifactSummary
    classification: Classification
    upstream: tuple[str, ...]  # direct dependencies (producers)
    downstream: tuple[str, ...]  # direct dependents
    peers: dict[str, tuple[str, ...]]  # characteristic id -> other artifacts sharing it


@dataclass(frozen=True)
class HistoryDelta:
    artifact_id: str
    rev_a: int
    rev_b: int
    status_a: VersionStatus
    status_b: VersionStatus
    hash_a: str
    hash_b: str
    classification_added: dict[str, frozenset[tuple[str, str]]]
    classification_removed: dict[str, frozenset[tuple[str, str]]]
    origin_a: Origin | None
    origin_b: Origin | None

    @property
    def empty(self) -> bool:
        return self.hash_a == self.hash_b


class RepoView:
    """Query façade over one consistent state snapshot (no lock needed)."""

    def __init__(self, state: RepoState):
        self.state = state
        groups, types = load_artifact_catalog()
        self.groups_by_id: dict[str, ArtifactGroup] = {g.id: g for g in groups}
        self.types_by_id: dict[str, ArtifactType] = {t.id: t for t in types}

    @classmethod
    def open(cls, repo: Repository | Path | str) -> "RepoView":
        repository = repo if isinstance(repo, Repository) else Repository(Path(repo))
        return cls(replay(repository))

    # -- summaries --

    def _origin_of(self, classification: Classification) -> Origin | None:
        try:
            return derive_origin(classification, self.state.config.origin_rule())
        except ClassificationError:
            return None

    def _summary(self, artifact_id: str) -> ArtifactSummary:
        record = self.state.graph.records[artifact_id]
        artifact_type = self.types_by_id[record.type_id]
        group = self.groups_by_id[artifact_type.group]
        return ArtifactSummary(
            artifact_id=artifact_id,
            title=record.title,
            type_id=record.type_id,
            group_id=group.id,
            phase=group.phase,
            origin=self._origin_of(record.classification),
            seq=self.state.graph.creation_seq(artifact_id),
        )

    # -- locate (T2) --

    def _check_filter_ids(self, f: Filter) -> None:
        taxonomy = self.state.active_taxonomy
        if f.group is not None and f.group not in self.groups_by_id:
            raise QueryError("unknown-id", f"unknown group {f.group!r}")
        if f.type_id is not None and f.type_id not in self.types_by_id:
            raise QueryError("unknown-id", f"unknown artifact type {f.type_id!r}")
        node_ids = {node_id for _, node_id, _, _ in taxonomy.iter_nodes()}
        for label, value, kinds in (
            ("dimension", f.dimension, ("dimension",)),
            ("category", f.category, ("category",)),
            ("characteristic", f.characteristic, ("characteristic",)),
        ):
            if value is not None and value not in node_ids:
                raise QueryError("unknown-id", f"unknown {label} id {value!r}")

    def locate(self, f: Filter | None = None) -> list[ArtifactSummary]:
        f = f or Filter()
        self._check_filter_ids(f)
        graph = self.state.graph
        results = []
        for artifact_id in sorted(graph.records, key=graph.creation_seq):
            summary = self._summary(artifact_id)
            record = graph.records[artifact_id]
            if f.phase is not None and summary.phase != f.phase:
                continue
            if f.group is not None and summary.group_id != f.group:
                continue
            if f.type_id is not None and summary.type_id != f.type_id:
                continue
            if f.origin is not None and summary.origin != f.origin:
                continue
            if f.dimension is not None and not record.classification.get(f.dimension):
                continue
            if f.category is not None and not any(
                cat == f.category for pairs in record.classification.values() for cat, _ in pairs
            ):
                continue
            if f.characteristic is not None and not any(
                char == f.characteristic
                for pairs in record.classification.values()
                for _, char in pairs
            ):
                continue
            if f.rev_min is not None or f.rev_max is not None:
                lo = f.rev_min if f.rev_min is not None else 1
                hi = f.rev_max if f.rev_max is not None else (1 << 60)
                if not any(lo <= v.revision <= hi for v in graph.history(artifact_id)):
                    continue
            results.append(summary)
        return results

    # -- summarize (T3) --

    def summarize(self, artifact_id: str) -> InfoCard:
        graph = self.state.graph
        if artifact_id not in graph.records:
            raise QueryError("unknown-artifact", f"artifact {artifact_id!r} not in repository")
        record = graph.records[artifact_id]
        upstream = tuple(
            sorted(
                (e.from_id for e in graph.edges if e.to_id == artifact_id),
                key=graph.creation_seq,
            )
        )
        downstream = tuple(
            sorted(
                (e.to_id for e in graph.edges if e.from_id == artifact_id),
                key=graph.creation_seq,
            )
        )
        peers: dict[str, tuple[str, ...]] = {}
        subject_chars = {char for pairs in record.classification.values() for _, char in pairs}
        for char_id in sorted(subject_chars):
            sharing = [
                other_id
                for other_id in sorted(graph.records, key=graph.creation_seq)
                if other_id != artifact_id
                and any(
                    char == char_id
                    for pairs in graph.records[other_id].classification.values()
                    for _, char in pairs
                )
            ]
            peers[char_id] = tuple(sharing)
        return InfoCard(
            summary=self._summary(artifact_id),
            classification=record.classification,
            upstream=upstream,
            downstream=downstream,
            peers=peers,
        )

    # -- compare (T4) --

    def compare_history(self, artifact_id: str, rev_a: int, rev_b: int) -> HistoryDelta:
        graph = self.state.graph
        if artifact_id not in graph.records:
            raise QueryError("unknown-artifact", f"artifact {artifact_id!r} not in repository")
        by_revision = {v.revision: v for v in graph.history(artifact_id)}
        for rev in (rev_a, rev_b):
            if rev not in by_revision:
                raise QueryError(
                    "missing-version", f"artifact {artifact_id!r} has no version at revision {rev}"
                )
        a, b = by_revision[rev_a], by_revision[rev_b]
        added: dict[str, frozenset[tuple[str, str]]] = {}
        removed: dict[str, frozenset[tuple[str, str]]] = {}
        for dim in sorted(set(a.classification) | set(b.classification)):
            pairs_a = a.classification.get(dim, frozenset())
            pairs_b = b.classification.get(dim, frozenset())
            if pairs_b - pairs_a:
                added[dim] = frozenset(pairs_b - pairs_a)
            if pairs_a - pairs_b:
                removed[dim] = frozenset(pairs_a - pairs_b)
        return HistoryDelta(
            artifact_id=artifact_id,
            rev_a=rev_a,
            rev_b=rev_b,
            status_a=a.status,
            status_b=b.status,
            hash_a=a.content_hash,
            hash_b=b.content_hash,
            classification_added=added,
            classification_removed=removed,
            origin_a=self._origin_of(a.classification),
            origin_b=self._origin_of(b.classification),
        )

    # -- export (T1) --

    def _dependency_order(self) -> list[str]:
        """Phase axis order: preparation → analysis → deployment →
        communication by creation within each phase; interactive-phase
        artifacts slot in at their global creation position."""
        graph = self.state.graph
        ranked = []
        interactive = []
        for artifact_id in sorted(graph.records, key=graph.creation_seq):
            phase = self.groups_by_id[self.types_by_id[graph.records[artifact_id].type_id].group].phase
            if phase == Phase.INTERACTIVE:
                interactive.append(artifact_id)
            else:
                ranked.append((_PHASE_RANK[phase], graph.creation_seq(artifact_id), artifact_id))
        ranked.sort()
        order = [artifact_id for _, _, artifact_id in ranked]
        for artifact_id in interactive:
            seq = graph.creation_seq(artifact_id)
            position = sum(1 for _, s, _ in ranked if s < seq)
            insert_at = position
            for placed in order[:position]:
                if placed in interactive:  # earlier interactive nodes already inserted
                    insert_at += 1
            order.insert(insert_at, artifact_id)
        return order

    def build_view_bundle(self) -> dict:
        if not self.state.graph.revisions:
            raise QueryError("no-revisions", "cannot export: repository has no revisions")
        graph = self.state.graph
        taxonomy = self.state.active_taxonomy

        ordered_ids = sorted(graph.records, key=graph.creation_seq)
        nodes = {}
        for artifact_id in ordered_ids:
            record = graph.records[artifact_id]
            summary = self._summary(artifact_id)
            nodes[artifact_id] = {
                "classification": classification_to_dict(record.classification),
                "group": summary.group_id,
                "origin": summary.origin.value if summary.origin else None,
                "phase": summary.phase.value,
                "seq": summary.seq,
                "title": record.title,
                "type_id": record.type_id,
            }

        ribbons: dict[tuple[str, str], int] = {}
        for artifact_id in ordered_ids:
            node = nodes[artifact_id]
            key = (node["phase"], node["origin"] or "unknown")
            ribbons[key] = ribbons.get(key, 0) + 1
        origin_view = {
            "nodes": [
                {
                    "id": artifact_id,
                    "origin": nodes[artifact_id]["origin"],
                    "phase": nodes[artifact_id]["phase"],
                    "title": nodes[artifact_id]["title"],
                }
                for artifact_id in ordered_ids
            ],
            "ribbons": [
                {"count": count, "origin": origin, "phase": phase}
                for (phase, origin), count in sorted(ribbons.items())
            ],
        }

        dependency_view = {
            "order": self._dependency_order(),
            "arcs": [
                {"declared_by": e.declared_by.value, "from": e.from_id, "to": e.to_id}
                for e in graph.edges
            ],
            "closures": {
                artifact_id: {
                    "downstream": graph.closure(artifact_id, "downstream"),
                    "upstream": graph.closure(artifact_id, "upstream"),
                }
                for artifact_id in ordered_ids
            },
        }

        rows = []
        for revision in graph.revisions:
            cells = []
            for version in graph.versions_at(revision.index):
                origin = self._origin_of(version.classification)
                cells.append(
                    {
                        "artifact_id": version.artifact_id,
                        "content_hash": version.content_hash,
                        "glyph": "triangle" if version.status == VersionStatus.UNCHANGED else "circle",
                        "origin": origin.value if origin else None,
                        "status": version.status.value,
                    }
                )
            rows.append(
                {
                    "cells": cells,
                    "created_at": revision.created_at,
                    "index": revision.index,
                    "label": revision.label,
                }
            )
        history_view = {"rows": rows}

        characteristic_index: dict[str, list[str]] = {}
        for artifact_id in ordered_ids:
            for pairs in graph.records[artifact_id].classification.values():
                for _, char_id in pairs:
                    characteristic_index.setdefault(char_id, []).append(artifact_id)
        characteristic_index = {k: characteristic_index[k] for k in sorted(characteristic_index)}

        labels = {node_id: name for _, node_id, name, _ in taxonomy.iter_nodes()}

        return {
            "characteristic_index": characteristic_index,
            "dependency_view": dependency_view,
            "history_view": history_view,
            "nodes": nodes,
            "origin_view": origin_view,
            "schema_version": SCHEMA_VERSION,
            "taxonomy_labels": labels,
        }

    def export_view_bundle(self, repo: Repository, out_path: Path | None = None) -> Path:
        bundle = self.build_view_bundle()
        problems = validate_view_bundle(bundle)
        if problems:
            raise QueryError("bundle-invalid", "; ".join(problems))
        target = out_path if out_path is not None else repo.exports_dir / EXPORT_NAME
        canonical.write_file(target, bundle)
        return target


def validate_view_bundle(bundle: dict) -> list[str]:
    """Referential-integrity check: every id any view mentions must resolve
    in the node table. Returns problem descriptions (empty = valid)."""
    problems = []
    if bundle.get("schema_version") != SCHEMA_VERSION:
        problems.append(f"schema_version is {bundle.get('schema_version')!r}, expected {SCHEMA_VERSION!r}")
        return problems
    known = set(bundle.get("nodes", {}))

    def check(artifact_id: str, where: str) -> None:
        if artifact_id not in known:
            problems.append(f"{where} references unknown artifact {artifact_id!r}")

    for node in bundle["origin_view"]["nodes"]:
        check(node["id"], "origin_view.nodes")
    for artifact_id in bundle["dependency_view"]["order"]:
        check(artifact_id, "dependency_view.order")
    for arc in bundle["dependency_view"]["arcs"]:
        check(arc["from"], "dependency_view.arcs")
        check(arc["to"], "dependency_view.arcs")
    for artifact_id, closure in bundle["dependency_view"]["closures"].items():
        check(artifact_id, "dependency_view.closures")
        for direction in ("upstream", "downstream"):
            for other in closure[direction]:
                check(other, f"dependency_view.closures.{direction}")
    for row in bundle["history_view"]["rows"]:
        for cell in row["cells"]:
            check(cell["artifact_id"], f"history_view row {row['index']}")
    for char_id, ids in bundle["characteristic_index"].items():
        for artifact_id in ids:
            check(artifact_id, f"characteristic_index[{char_id}]")
    return problems
