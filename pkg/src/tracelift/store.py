"""Repository persistence.

One directory per repository:

    tracelift.json      configuration (canonical JSON)
    events.log          append-only event log, one canonical-JSON line each
    taxonomy/           materialized revisions, rev-%04d.json
    artifacts/          materialized current record per artifact id
    blobs/              content-addressed payloads, file name = sha256 hex
    exports/            view bundles and other derived outputs

The event log is the single source of truth: every mutation appends exactly
one event, and replaying the log reproduces the live state. The
materialized files are conveniences rebuilt from events. Writers hold the
`.lock` file; readers never need it.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Mapping, Sequence

from filelock import FileLock, Timeout
from PIL import Image, UnidentifiedImageError

from . import canonical
from .artifact import (
    ArtifactGroup,
    ArtifactRecord,
    ArtifactType,
    Classification,
    ClassificationError,
    Origin,
    Provenance,
    classification_from_dict,
    classification_to_dict,
    content_fingerprint,
    load_artifact_catalog,
    new_artifact_id,
    now_ms,
    record_from_dict,
    record_to_dict,
    validate_classification,
)
from .evolution import (
    ChangeOp,
    TaxonomyRevision,
    record_revision,
    revision_from_dict,
    revision_to_dict,
)
from .taxonomy import Taxonomy, load_bundled_taxonomy
from .tracegraph import (
    DeclaredBy,
    DependencyEdge,
    Revision,
    TraceGraph,
    VersionStatus,
    edge_from_dict,
    edge_to_dict,
)

CONFIG_NAME = "tracelift.json"
EVENTS_NAME = "events.log"
LOCK_NAME = ".lock"
REPO_FORMAT = "tracelift-repo/1"

EVENT_KINDS = (
    "ArtifactCreated",
    "ArtifactClassified",
    "EdgeAdded",
    "RevisionSnapshotted",
    "TaxonomyRevised",
    "BlobAttached",
)


class StoreError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class RepositoryConfig:
    classification_mode: str = "descriptive"
    data_origin_rule: tuple[tuple[str, str], ...] = (
        ("c1.2.1", "human"),
        ("c1.2.2", "machine"),
    )

    def origin_rule(self) -> dict[str, Origin]:
        return {char_id: Origin(origin) for char_id, origin in self.data_origin_rule}

    def to_dict(self) -> dict:
        return {
            "classification_mode": self.classification_mode,
            "data_origin_rule": {char_id: origin for char_id, origin in self.data_origin_rule},
            "format": REPO_FORMAT,
        }

    @staticmethod
    def from_dict(doc: Mapping[str, object]) -> "RepositoryConfig":
        if doc.get("format") != REPO_FORMAT:
            raise StoreError("not-a-repository", f"unsupported repository format: {doc.get('format')!r}")
        mode = str(doc.get("classification_mode", "descriptive"))
        if mode not in ("strict", "descriptive"):
            raise StoreError("bad-config", f"unknown classification mode {mode!r}")
        rule = doc.get("data_origin_rule") or {}
        pairs = tuple(sorted((str(k), str(v)) for k, v in rule.items()))  # type: ignore[union-attr]
        for _, origin in pairs:
            if origin not in ("human", "machine"):
                raise StoreError("bad-config", f"origin must be human or machine, got {origin!r}")
        return RepositoryConfig(classification_mode=mode, data_origin_rule=pairs)


@dataclass(frozen=True)
class Event:
    seq: int
    at: int
    kind: str
    body: dict

    def to_line(self) -> str:
        return canonical.dumps({"at": self.at, "body": self.body, "kind": self.kind, "seq": self.seq}) + "\n"

    @staticmethod
    def from_line(line: str) -> "Event":
        doc = canonical.loads(line)
        return Event(seq=int(doc["seq"]), at=int(doc["at"]), kind=str(doc["kind"]), body=doc["body"])


@dataclass(frozen=True)
class Demarcation:
    """One artifact marked up inside a capture file."""

    selector: str  # JSON: slash-delimited key path; image: "x,y,w,h" pixels
    type_id: str
    title: str
    generator: Origin  # the annotator must state human involvement explicitly
    classification: Classification | None = None  # None: use the type's default, may be partial
    actor_label: str = ""
    notes: str = ""


@dataclass(frozen=True)
class CaptureFile:
    path: Path
    format: str  # "json" | "image"
    demarcations: tuple[Demarcation, ...]

    def __post_init__(self):
        if self.format not in ("json", "image"):
            raise StoreError("bad-capture", f"capture format must be json or image, got {self.format!r}")


class Repository:
    """Path bookkeeping for one on-disk repository."""

    def __init__(self, root: Path | str):
        self.root = Path(root)

    @property
    def config_path(self) -> Path:
        return self.root / CONFIG_NAME

    @property
    def events_path(self) -> Path:
        return self.root / EVENTS_NAME

    @property
    def taxonomy_dir(self) -> Path:
        return self.root / "taxonomy"

    @property
    def artifacts_dir(self) -> Path:
        return self.root / "artifacts"

    @property
    def blobs_dir(self) -> Path:
        return self.root / "blobs"

    @property
    def exports_dir(self) -> Path:
        return self.root / "exports"

    @property
    def lock_path(self) -> Path:
        return self.root / LOCK_NAME

    def exists(self) -> bool:
        return self.config_path.is_file()

    def read_config(self) -> RepositoryConfig:
        if not self.exists():
            raise StoreError("not-a-repository", f"{self.root} has no {CONFIG_NAME}")
        return RepositoryConfig.from_dict(canonical.read_file(self.config_path))

    def revision_path(self, index: int) -> Path:
        return self.taxonomy_dir / f"rev-{index:04d}.json"

    def blob_path(self, sha256_hex: str) -> Path:
        return self.blobs_dir / sha256_hex

    def artifact_path(self, artifact_id: str) -> Path:
        return self.artifacts_dir / f"{artifact_id}.json"


def init_repo(path: Path | str, config: RepositoryConfig | None = None) -> Repository:
    root = Path(path)
    if root.exists() and any(root.iterdir()):
        raise StoreError("already-initialized", f"{root} is not empty")
    repo = Repository(root)
    root.mkdir(parents=True, exist_ok=True)
    for directory in (repo.taxonomy_dir, repo.artifacts_dir, repo.blobs_dir, repo.exports_dir):
        directory.mkdir()
    canonical.write_file(repo.config_path, (config or RepositoryConfig()).to_dict())
    repo.events_path.touch()
    return repo


def open_repo(path: Path | str) -> Repository:
    repo = Repository(path)
    repo.read_config()  # raises not-a-repository / bad-config
    return repo


# --- state & replay ------------------------------------------------------------

@dataclass
class RepoState:
    config: RepositoryConfig
    graph: TraceGraph = field(default_factory=TraceGraph)
    taxonomy_revisions: list[TaxonomyRevision] = field(default_factory=list)
    blob_hashes: set[str] = field(default_factory=set)
    last_seq: int = 0
    last_at: int = 0

    @property
    def active_taxonomy(self) -> Taxonomy:
        """Latest recorded revision, or the bundled taxonomy for a fresh repo."""
        if self.taxonomy_revisions:
            return self.taxonomy_revisions[-1].taxonomy
        return load_bundled_taxonomy()


def _apply_event(state: RepoState, event: Event) -> None:
    if event.seq != state.last_seq + 1:
        raise StoreError(
            "log-corrupt",
            f"event seq {event.seq} breaks the sequence; expected {state.last_seq + 1}",
        )
    kind, body = event.kind, event.body
    if kind == "ArtifactCreated":
        state.graph.add_artifact(record_from_dict(body))
    elif kind == "ArtifactClassified":
        prior = state.graph.records.get(str(body["artifact_id"]))
        if prior is None:
            raise StoreError("log-corrupt", f"event {event.seq} classifies unknown artifact")
        updated = ArtifactRecord(
            artifact_id=prior.artifact_id,
            type_id=prior.type_id,
            title=str(body.get("title", prior.title)),
            classification=classification_from_dict(body["classification"]),
            provenance=prior.provenance,
            payload_ref=prior.payload_ref,
            notes=prior.notes,
        )
        state.graph.replace_artifact(updated)
    elif kind == "EdgeAdded":
        edge = edge_from_dict(body)
        state.graph.add_dependency(edge.from_id, edge.to_id, edge.declared_by, edge.note)
    elif kind == "RevisionSnapshotted":
        changes = {
            artifact_id: (
                VersionStatus(change["status"]),
                str(change["content_hash"]),
                classification_from_dict(change["classification"]),
            )
            for artifact_id, change in body["changes"].items()
        }
        state.graph.snapshot_revision(str(body["label"]), changes, int(body["created_at"]))
    elif kind == "TaxonomyRevised":
        state.taxonomy_revisions.append(revision_from_dict(body))
    elif kind == "BlobAttached":
        state.blob_hashes.add(str(body["sha256"]))
    else:
        raise StoreError("log-corrupt", f"event {event.seq} has unknown kind {kind!r}")
    state.last_seq = event.seq
    state.last_at = max(state.last_at, event.at)


def iter_events(repo: Repository) -> Iterator[Event]:
    with open(repo.events_path, "r", encoding="utf-8", newline="") as handle:
        for line_no, line in enumerate(handle, 1):
            if not line.endswith("\n"):
                raise StoreError("log-corrupt", f"line {line_no} is not newline-terminated")
            try:
                yield Event.from_line(line[:-1])
            except (ValueError, KeyError, TypeError) as exc:
                raise StoreError("log-corrupt", f"line {line_no} does not parse: {exc}") from exc


def replay(repo: Repository) -> RepoState:
    """Fold the event log into fresh in-memory state."""
    state = RepoState(config=repo.read_config())
    for event in iter_events(repo):
        try:
            _apply_event(state, event)
        except StoreError:
            raise
        except (ValueError, KeyError, TypeError) as exc:
            raise StoreError("log-corrupt", f"event {event.seq} cannot be applied: {exc}") from exc
    return state


# --- capture resolution ----------------------------------------------------------

def resolve_json_selector(document: object, selector: str) -> object:
    """Walk a slash-delimited key path; list steps are decimal indices."""
    if selector in ("", "/"):
        return document
    node = document
    for step in selector.strip("/").split("/"):
        if isinstance(node, Mapping) and step in node:
            node = node[step]
        elif isinstance(node, list) and step.isdigit() and int(step) < len(node):
            node = node[int(step)]
        else:
            raise StoreError("selector-unresolved", f"selector {selector!r} fails at step {step!r}")
    return node


def parse_region(selector: str) -> tuple[int, int, int, int]:
    parts = selector.split(",")
    if len(parts) != 4:
        raise StoreError("selector-unresolved", f"region must be 'x,y,w,h', got {selector!r}")
    try:
        x, y, w, h = (int(p) for p in parts)
    except ValueError as exc:
        raise StoreError("selector-unresolved", f"region must be integers: {selector!r}") from exc
    return x, y, w, h


def validate_region(image_bytes: bytes, selector: str) -> None:
    x, y, w, h = parse_region(selector)
    try:
        with Image.open(io.BytesIO(image_bytes)) as img:
            width, height = img.size
    except UnidentifiedImageError as exc:
        raise StoreError("selector-unresolved", f"capture is not a readable image: {exc}") from exc
    if w <= 0 or h <= 0 or x < 0 or y < 0 or x + w > width or y + h > height:
        raise StoreError(
            "selector-unresolved",
            f"region {selector!r} falls outside the {width}x{height} image",
        )


# --- workspace -------------------------------------------------------------------

class Workspace:
    """Single-writer session over a repository.

    Holds the lock for its lifetime; every mutation appends one event and
    applies it to the in-memory state through the same code path replay
    uses, so live state and replayed state cannot drift apart.
    """

    def __init__(self, repo: Repository | Path | str, *, lock_timeout: float = 5.0):
        self.repo = repo if isinstance(repo, Repository) else open_repo(repo)
        self._lock = FileLock(str(self.repo.lock_path))
        try:
            self._lock.acquire(timeout=lock_timeout)
        except Timeout as exc:
            raise StoreError("locked", f"another writer holds {self.repo.lock_path}") from exc
        try:
            self.state = replay(self.repo)
            groups, types = load_artifact_catalog()
            self.groups_by_id: dict[str, ArtifactGroup] = {g.id: g for g in groups}
            self.types_by_id: dict[str, ArtifactType] = {t.id: t for t in types}
            self._last_created_at = max(
                (r.provenance.created_at for r in self.state.graph.records.values()), default=0
            )
        except BaseException:
            self._lock.release()
            raise

    # -- context management --

    def close(self) -> None:
        if self._lock.is_locked:
            self._lock.release()

    def __enter__(self) -> "Workspace":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()

    # -- internals --

    def _timestamp(self, explicit: int | None = None) -> int:
        # event times never run backwards, even if the wall clock does
        at = explicit if explicit is not None else now_ms()
        return max(at, self.state.last_at)

    def _commit(self, kind: str, body: dict, at: int) -> Event:
        event = Event(seq=self.state.last_seq + 1, at=at, kind=kind, body=body)
        _apply_event(self.state, event)
        with open(self.repo.events_path, "a", encoding="utf-8", newline="") as handle:
            handle.write(event.to_line())
        return event

    def _materialize_record(self, record: ArtifactRecord) -> None:
        canonical.write_file(self.repo.artifact_path(record.artifact_id), record_to_dict(record))

    # -- artifact operations --

    def create_artifact(
        self,
        type_id: str,
        title: str,
        classification: Classification,
        provenance: Provenance,
        *,
        payload_ref: str | None = None,
        notes: str = "",
        allow_partial: bool = False,
        artifact_id: str | None = None,
    ) -> ArtifactRecord:
        if type_id not in self.types_by_id:
            raise ClassificationError("unknown-type", f"artifact type {type_id!r} not in catalog")
        if provenance.created_at < self._last_created_at:
            raise StoreError(
                "timestamp-regression",
                f"created_at {provenance.created_at} precedes an existing record's "
                f"{self._last_created_at}; creation order must be non-decreasing",
            )
        validate_classification(
            classification,
            self.state.active_taxonomy,
            self.state.config.classification_mode,
            allow_partial=allow_partial,
        )
        record = ArtifactRecord(
            artifact_id=artifact_id if artifact_id is not None else new_artifact_id(),
            type_id=type_id,
            title=title,
            classification=classification,
            provenance=provenance,
            payload_ref=payload_ref,
            notes=notes,
        )
        at = self._timestamp(provenance.created_at)
        self._commit("ArtifactCreated", record_to_dict(record), at)
        self._last_created_at = provenance.created_at
        self._materialize_record(record)
        return record

    def classify_artifact(
        self, artifact_id: str, classification: Classification, at: int | None = None
    ) -> ArtifactRecord:
        """Replace an artifact's classification (typed captures are
        classified or re-judged after ingestion)."""
        if artifact_id not in self.state.graph.records:
            raise StoreError("unknown-artifact", f"artifact {artifact_id!r} not in repository")
        validate_classification(
            classification,
            self.state.active_taxonomy,
            self.state.config.classification_mode,
            allow_partial=True,
        )
        self._commit(
            "ArtifactClassified",
            {
                "artifact_id": artifact_id,
                "classification": classification_to_dict(classification),
            },
            self._timestamp(at),
        )
        record = self.state.graph.records[artifact_id]
        self._materialize_record(record)
        return record

    def add_dependency(
        self,
        from_id: str,
        to_id: str,
        declared_by: DeclaredBy,
        note: str = "",
        at: int | None = None,
    ) -> DependencyEdge:
        # validation happens when the event is applied, before anything is appended
        probe = DependencyEdge(from_id=from_id, to_id=to_id, declared_by=declared_by, note=note)
        event = self._commit("EdgeAdded", edge_to_dict(probe), self._timestamp(at))
        return edge_from_dict(event.body)

    def attach_blob(self, data: bytes, at: int | None = None) -> str:
        digest = canonical.sha256_hex(data)
        path = self.repo.blob_path(digest)
        if not path.exists():
            path.write_bytes(data)
        if digest not in self.state.blob_hashes:
            self._commit("BlobAttached", {"sha256": digest, "size": len(data)}, self._timestamp(at))
        return digest

    def ingest_capture(self, capture: CaptureFile, at: int | None = None) -> list[ArtifactRecord]:
        """Demarcate one capture file into artifact records.

        The whole file is stored once as a blob; each record's payload_ref
        is "<blob hash>#<selector>". Records are created in demarcation
        order; classification may be partial (classify later).
        """
        data = Path(capture.path).read_bytes()
        if capture.format == "json":
            try:
                document = canonical.loads(data.decode("utf-8"))
            except (UnicodeDecodeError, ValueError) as exc:
                raise StoreError("bad-capture", f"capture does not parse as JSON: {exc}") from exc
            for demarcation in capture.demarcations:
                resolve_json_selector(document, demarcation.selector)
            capture_method = "api-dump"
        else:
            for demarcation in capture.demarcations:
                validate_region(data, demarcation.selector)
            capture_method = "screenshot"
        for demarcation in capture.demarcations:
            if demarcation.type_id not in self.types_by_id:
                raise ClassificationError(
                    "unknown-type", f"artifact type {demarcation.type_id!r} not in catalog"
                )

        blob_hash = self.attach_blob(data, at)
        records = []
        for demarcation in capture.demarcations:
            classification = demarcation.classification
            if classification is None:
                default = self.types_by_id[demarcation.type_id].default_classification
                classification = dict(default) if default else {}
            provenance = Provenance(
                created_at=self._timestamp(at),
                generator=demarcation.generator,
                actor_label=demarcation.actor_label,
                capture_method=capture_method,
            )
            records.append(
                self.create_artifact(
                    demarcation.type_id,
                    demarcation.title,
                    classification,
                    provenance,
                    payload_ref=f"{blob_hash}#{demarcation.selector}",
                    notes=demarcation.notes,
                    allow_partial=True,
                )
            )
        return records

    # -- revisions --

    def snapshot(self, label: str, created_at: int | None = None) -> Revision:
        """Snapshot the current state of every artifact as a new revision.

        Statuses are computed: no prior version → New; content fingerprint
        differs → Modified; otherwise omitted and auto-filled Unchanged.
        """
        at = self._timestamp(created_at)
        changes: dict[str, dict] = {}
        graph = self.state.graph
        for artifact_id in sorted(graph.records, key=graph.creation_seq):
            record = graph.records[artifact_id]
            fingerprint = content_fingerprint(record.title, record.classification, record.payload_ref)
            history = graph.history(artifact_id)
            if not history:
                status = VersionStatus.NEW
            elif history[-1].content_hash != fingerprint:
                status = VersionStatus.MODIFIED
            else:
                continue
            changes[artifact_id] = {
                "classification": classification_to_dict(record.classification),
                "content_hash": fingerprint,
                "status": status.value,
            }
        body = {"changes": changes, "created_at": at, "label": label}
        self._commit("RevisionSnapshotted", body, at)
        return self.state.graph.revisions[-1]

    def revise_taxonomy(
        self,
        taxonomy: Taxonomy,
        changelog: Sequence[ChangeOp],
        object_classifications: Mapping[str, Classification],
        *,
        lenient: bool = False,
        at: int | None = None,
    ) -> TaxonomyRevision:
        previous = self.state.taxonomy_revisions[-1] if self.state.taxonomy_revisions else None
        revision = record_revision(
            previous, taxonomy, changelog, object_classifications, lenient=lenient
        )
        body = revision_to_dict(revision)
        self._commit("TaxonomyRevised", body, self._timestamp(at))
        canonical.write_file(self.repo.revision_path(revision.index), body)
        return revision
