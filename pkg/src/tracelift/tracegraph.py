"""Dependency graph and revision history over captured artifacts.

Edges point downstream (from=upstream producer, to=dependent consumer) and
the graph must stay acyclic: re-running an earlier stage is a new revision,
never a back-edge. Versions are snapshot-per-revision; an artifact that
exists gets exactly one version in every revision from its first appearance
on, with omitted artifacts auto-filled as Unchanged.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from enum import Enum
from typing import Mapping

from .artifact import (
    CAPTURE_METHODS,
    ArtifactRecord,
    Classification,
    Origin,
    classification_from_dict,
    classification_to_dict,
)
from .taxonomy import Taxonomy


class DeclaredBy(str, Enum):
    HUMAN = "human"
    MACHINE = "machine"
    INFERRED = "inferred"


class VersionStatus(str, Enum):
    NEW = "new"
    MODIFIED = "modified"
    UNCHANGED = "unchanged"


class GraphError(ValueError):
    """Graph operation rejected; ``code`` is machine-readable, ``path``
    carries the offending node sequence for cycle errors."""

    def __init__(self, code: str, message: str, path: list[str] | None = None):
        super().__init__(message)
        self.code = code
        self.path = path or []


@dataclass(frozen=True)
class DependencyEdge:
    from_id: str
    to_id: str
    declared_by: DeclaredBy
    note: str = ""


@dataclass(frozen=True)
class Revision:
    index: int
    label: str
    created_at: int


@dataclass(frozen=True)
class ArtifactVersion:
    artifact_id: str
    revision: int
    status: VersionStatus
    content_hash: str
    classification: Classification


@dataclass(frozen=True)
class LineageReport:
    artifact_id: str
    definition_ok: bool
    provenance_ok: bool
    lineage_ok: bool
    missing: tuple[str, ...]

    @property
    def traceable(self) -> bool:
        return self.definition_ok and self.provenance_ok and self.lineage_ok


# status, content hash, classification snapshot
VersionChange = tuple[VersionStatus, str, Classification]


class TraceGraph:
    """In-memory projection of artifacts, dependencies, and revisions.

    Mutations happen only through the store's single-writer path (or during
    replay); reads are safe against any consistent instance.
    """

    def __init__(self) -> None:
        self.records: dict[str, ArtifactRecord] = {}
        self._seq: dict[str, int] = {}  # creation order, the deterministic tie-break
        self._next_seq = 0
        self.edges: list[DependencyEdge] = []
        self._edge_keys: set[tuple[str, str]] = set()
        self._downstream: dict[str, set[str]] = {}  # from -> {to}
        self._upstream: dict[str, set[str]] = {}  # to -> {from}
        self.revisions: list[Revision] = []
        self._versions: dict[str, list[ArtifactVersion]] = {}  # artifact -> by revision order

    # --- artifacts ---

    def add_artifact(self, record: ArtifactRecord) -> None:
        if record.artifact_id in self.records:
            raise GraphError("duplicate-artifact", f"artifact {record.artifact_id!r} already registered")
        self.records[record.artifact_id] = record
        self._seq[record.artifact_id] = self._next_seq
        self._next_seq += 1

    def replace_artifact(self, record: ArtifactRecord) -> None:
        """Swap the current record for an existing id (reclassification,
        retitling); creation order is preserved."""
        if record.artifact_id not in self.records:
            raise GraphError("unknown-artifact", f"artifact {record.artifact_id!r} not registered")
        prior = self.records[record.artifact_id]
        if record.type_id != prior.type_id:
            raise GraphError("type-immutable", f"artifact {record.artifact_id!r} cannot change type")
        self.records[record.artifact_id] = record

    def purge_artifact(self, artifact_id: str) -> None:
        """Drop a record while leaving edges and versions in place.

        Deliberately corrupting: exists so tests (and repair tooling) can
        produce dangling lineage and observe is_traceable flag it.
        """
        if artifact_id not in self.records:
            raise GraphError("unknown-artifact", f"artifact {artifact_id!r} not registered")
        del self.records[artifact_id]

    def creation_seq(self, artifact_id: str) -> int:
        return self._seq[artifact_id]

    # --- dependencies ---

    def add_dependency(self, from_id: str, to_id: str, declared_by: DeclaredBy, note: str = "") -> DependencyEdge:
        if from_id not in self.records:
            raise GraphError("unknown-endpoint", f"upstream artifact {from_id!r} not registered")
        if to_id not in self.records:
            raise GraphError("unknown-endpoint", f"downstream artifact {to_id!r} not registered")
        if from_id == to_id:
            raise GraphError("self-loop", f"artifact {from_id!r} cannot depend on itself")
        if (from_id, to_id) in self._edge_keys:
            raise GraphError("duplicate-edge", f"edge {from_id!r} -> {to_id!r} already exists")
        cycle_path = self._find_path(to_id, from_id)
        if cycle_path is not None:
            raise GraphError(
                "cycle",
                f"edge {from_id!r} -> {to_id!r} would close the cycle {' -> '.join(cycle_path)}",
                path=cycle_path,
            )
        edge = DependencyEdge(from_id=from_id, to_id=to_id, declared_by=declared_by, note=note)
        self.edges.append(edge)
        self._edge_keys.add((from_id, to_id))
        self._downstream.setdefault(from_id, set()).add(to_id)
        self._upstream.setdefault(to_id, set()).add(from_id)
        return edge

    def _find_path(self, start: str, goal: str) -> list[str] | None:
        """Deterministic DFS along downstream edges; returns node path
        start..goal or None."""
        if start == goal:
            return [start]
        parent: dict[str, str] = {}
        stack = [start]
        seen = {start}
        while stack:
            node = stack.pop()
            nxt = sorted(self._downstream.get(node, ()), key=lambda n: self._seq[n], reverse=True)
            for child in nxt:
                if child in seen:
                    continue
                parent[child] = node
                if child == goal:
                    path = [goal]
                    while path[-1] != start:
                        path.append(parent[path[-1]])
                    return list(reversed(path))
                seen.add(child)
                stack.append(child)
        return None

    def closure(self, artifact_id: str, direction: str) -> list[str]:
        """Transitive closure, topologically ordered ancestors-first.

        Excludes the query node. Ties (nodes with no ordering constraint
        between them) break by creation order, so the result is stable.
        """
        if artifact_id not in self.records:
            raise GraphError("unknown-artifact", f"artifact {artifact_id!r} not registered")
        if direction == "upstream":
            adjacency = self._upstream
        elif direction == "downstream":
            adjacency = self._downstream
        else:
            raise ValueError(f"direction must be 'upstream' or 'downstream', got {direction!r}")

        members: set[str] = set()
        frontier = [artifact_id]
        while frontier:
            node = frontier.pop()
            for neighbor in adjacency.get(node, ()):
                if neighbor not in members:
                    members.add(neighbor)
                    frontier.append(neighbor)
        members.discard(artifact_id)
        if not members:
            return []

        # Kahn over the induced subgraph, min-heap on creation order.
        indegree = {n: 0 for n in members}
        for n in members:
            for child in self._downstream.get(n, ()):
                if child in members:
                    indegree[child] += 1
        heap = [(self._seq[n], n) for n, d in indegree.items() if d == 0]
        heapq.heapify(heap)
        ordered: list[str] = []
        while heap:
            _, node = heapq.heappop(heap)
            ordered.append(node)
            for child in self._downstream.get(node, ()):
                if child in indegree:
                    indegree[child] -= 1
                    if indegree[child] == 0:
                        heapq.heappush(heap, (self._seq[child], child))
        return ordered

    # --- revisions & versions ---

    def snapshot_revision(
        self,
        label: str,
        changes: Mapping[str, VersionChange],
        created_at: int,
    ) -> Revision:
        index = len(self.revisions) + 1
        previous: dict[str, ArtifactVersion] = {}
        if self.revisions:
            prev_index = self.revisions[-1].index
            for artifact_id, versions in self._versions.items():
                if versions and versions[-1].revision == prev_index:
                    previous[artifact_id] = versions[-1]

        staged: list[ArtifactVersion] = []
        for artifact_id, (status, content_hash, classification) in changes.items():
            if artifact_id not in self.records:
                raise GraphError("unknown-artifact", f"artifact {artifact_id!r} not registered")
            prior = previous.get(artifact_id)
            if status == VersionStatus.NEW and prior is not None:
                raise GraphError(
                    "status-inconsistent",
                    f"artifact {artifact_id!r} already versioned; cannot be New in revision {index}",
                )
            if status != VersionStatus.NEW and prior is None:
                raise GraphError(
                    "status-inconsistent",
                    f"artifact {artifact_id!r} has no version in revision {index - 1}; must be New",
                )
            if status == VersionStatus.UNCHANGED and content_hash != prior.content_hash:
                raise GraphError(
                    "hash-mismatch",
                    f"Unchanged artifact {artifact_id!r} must keep hash {prior.content_hash}",
                )
            if status == VersionStatus.MODIFIED and content_hash == prior.content_hash:
                raise GraphError(
                    "hash-mismatch",
                    f"Modified artifact {artifact_id!r} carries an identical hash",
                )
            staged.append(
                ArtifactVersion(
                    artifact_id=artifact_id,
                    revision=index,
                    status=status,
                    content_hash=content_hash,
                    classification=classification,
                )
            )

        for artifact_id, prior in previous.items():
            if artifact_id not in changes:
                staged.append(
                    ArtifactVersion(
                        artifact_id=artifact_id,
                        revision=index,
                        status=VersionStatus.UNCHANGED,
                        content_hash=prior.content_hash,
                        classification=prior.classification,
                    )
                )

        revision = Revision(index=index, label=label, created_at=created_at)
        self.revisions.append(revision)
        for version in staged:
            self._versions.setdefault(version.artifact_id, []).append(version)
        return revision

    def history(self, artifact_id: str) -> list[ArtifactVersion]:
        if artifact_id not in self.records:
            raise GraphError("unknown-artifact", f"artifact {artifact_id!r} not registered")
        return list(self._versions.get(artifact_id, []))

    def versions_at(self, revision_index: int) -> list[ArtifactVersion]:
        out = [vs for versions in self._versions.values() for vs in versions if vs.revision == revision_index]
        out.sort(key=lambda v: self._seq.get(v.artifact_id, 1 << 60))
        return out

    # --- traceability ---

    def is_traceable(self, artifact_id: str, taxonomy: Taxonomy) -> LineageReport:
        """Definition (fully classified), provenance (complete creation
        record), and lineage (resolvable dependencies, gap-free versions)."""
        if artifact_id not in self.records:
            raise GraphError("unknown-artifact", f"artifact {artifact_id!r} not registered")
        record = self.records[artifact_id]
        missing: list[str] = []

        for dim in taxonomy.dimensions:
            if not record.classification.get(dim.id):
                missing.append(f"dimension:{dim.name.lower()}")
        definition_ok = not missing

        provenance_missing: list[str] = []
        p = record.provenance
        if not isinstance(p.created_at, int) or p.created_at < 0:
            provenance_missing.append("provenance:created_at")
        if p.generator not in (Origin.HUMAN, Origin.MACHINE):
            provenance_missing.append("provenance:generator")
        if p.capture_method not in CAPTURE_METHODS:
            provenance_missing.append("provenance:capture_method")
        provenance_ok = not provenance_missing
        missing.extend(provenance_missing)

        lineage_missing: list[str] = []
        for upstream_id in sorted(self._upstream.get(artifact_id, ()), key=lambda n: self._seq[n]):
            if upstream_id not in self.records:
                lineage_missing.append(f"lineage:dangling-edge:{upstream_id}")
        versions = self._versions.get(artifact_id, [])
        if versions and self.revisions:
            first = versions[0].revision
            have = {v.revision for v in versions}
            for r in range(first, self.revisions[-1].index + 1):
                if r not in have:
                    lineage_missing.append(f"lineage:version-gap:rev-{r}")
        lineage_ok = not lineage_missing
        missing.extend(lineage_missing)

        return LineageReport(
            artifact_id=artifact_id,
            definition_ok=definition_ok,
            provenance_ok=provenance_ok,
            lineage_ok=lineage_ok,
            missing=tuple(missing),
        )


# --- (de)serialization ----------------------------------------------------------

def edge_to_dict(e: DependencyEdge) -> dict:
    return {"declared_by": e.declared_by.value, "from": e.from_id, "note": e.note, "to": e.to_id}


def edge_from_dict(doc: Mapping[str, object]) -> DependencyEdge:
    return DependencyEdge(
        from_id=str(doc["from"]),
        to_id=str(doc["to"]),
        declared_by=DeclaredBy(doc["declared_by"]),
        note=str(doc.get("note", "")),
    )


def version_to_dict(v: ArtifactVersion) -> dict:
    return {
        "artifact_id": v.artifact_id,
        "classification": classification_to_dict(v.classification),
        "content_hash": v.content_hash,
        "revision": v.revision,
        "status": v.status.value,
    }


def version_from_dict(doc: Mapping[str, object]) -> ArtifactVersion:
    return ArtifactVersion(
        artifact_id=str(doc["artifact_id"]),
        revision=int(doc["revision"]),  # type: ignore[arg-type]
        status=VersionStatus(doc["status"]),
        content_hash=str(doc["content_hash"]),
        classification=classification_from_dict(doc["classification"]),  # type: ignore[arg-type]
    )
