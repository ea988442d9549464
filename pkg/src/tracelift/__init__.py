"""tracelift: traceability bookkeeping for human/machine data work.

Capture artifacts as typed, classified records; declare dependencies;
snapshot revisions; and replay everything from an append-only event log.
The bundled taxonomy (Source, Transmission Mode, Artifact Format, Task)
and the artifact-type catalog describe AutoML-assisted analyses; the
taxonomy itself is versioned with audited changelogs and iteration end
conditions.
"""

from .artifact import (
    ArtifactGroup,
    ArtifactRecord,
    ArtifactType,
    Classification,
    ClassificationError,
    Origin,
    Phase,
    Provenance,
    content_fingerprint,
    derive_origin,
    load_artifact_catalog,
    validate_classification,
)
from .evolution import (
    ChangeKind,
    ChangeOp,
    EndConditionReport,
    EvolutionError,
    TaxonomyRevision,
    apply_changelog,
    coverage_report,
    evaluate_end_conditions,
    record_revision,
)
from .query_export import Filter, InfoCard, QueryError, RepoView, validate_view_bundle
from .store import (
    CaptureFile,
    Demarcation,
    Repository,
    RepositoryConfig,
    StoreError,
    Workspace,
    init_repo,
    open_repo,
    replay,
)
from .taxonomy import (
    Taxonomy,
    TaxonomyDataError,
    ValidationReport,
    diff_taxonomies,
    load_bundled_taxonomy,
    parse_taxonomy,
    serialize_taxonomy,
    validate_taxonomy,
)
from .tracegraph import (
    ArtifactVersion,
    DeclaredBy,
    DependencyEdge,
    GraphError,
    LineageReport,
    Revision,
    TraceGraph,
    VersionStatus,
)

__version__ = "0.1.0"

__all__ = [
    "ArtifactGroup",
    "ArtifactRecord",
    "ArtifactType",
    "ArtifactVersion",
    "CaptureFile",
    "ChangeKind",
    "ChangeOp",
    "Classification",
    "ClassificationError",
    "DeclaredBy",
    "Demarcation",
    "DependencyEdge",
    "EndConditionReport",
    "EvolutionError",
    "Filter",
    "GraphError",
    "InfoCard",
    "LineageReport",
    "Origin",
    "Phase",
    "Provenance",
    "QueryError",
    "RepoView",
    "Repository",
    "RepositoryConfig",
    "Revision",
    "StoreError",
    "Taxonomy",
    "TaxonomyDataError",
    "TaxonomyRevision",
    "TraceGraph",
    "ValidationReport",
    "VersionStatus",
    "Workspace",
    "apply_changelog",
    "content_fingerprint",
    "coverage_report",
    "derive_origin",
    "diff_taxonomies",
    "evaluate_end_conditions",
    "init_repo",
    "load_artifact_catalog",
    "load_bundled_taxonomy",
    "open_repo",
    "parse_taxonomy",
    "record_revision",
    "replay",
    "serialize_taxonomy",
    "validate_classification",
    "validate_taxonomy",
    "validate_view_bundle",
]
