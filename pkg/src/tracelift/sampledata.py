"""Deterministic demonstration fixtures.

Two builders used by the test suite, the demo script, and the explorer UI
fixtures. Both are fully deterministic — fixed ids, fixed timestamps — so
derived exports can be committed as golden files.

``build_scenario_repo`` writes a small loan-scoring study: an analyst's
initial dataset flows through platform-suggested wrangling into a feature
set, an initial model specification, and a deployment alert feed, across
four revisions. The feature set starts machine-sourced and is reclassified
as human work in the second revision after the analyst rewrites it.

``build_taxonomy_iterations`` returns eight recorded revisions of a small
workshop taxonomy whose iteration settles only at the end: revisions 2–7
each change something (including one merge and one split), and revision 8
repeats revision 7 with full characteristic coverage, so the objective end
conditions hold only for the final pair.
"""

from __future__ import annotations

import itertools
import uuid
from dataclasses import dataclass
from pathlib import Path

from .artifact import Classification, Origin, Provenance
from .evolution import ChangeKind, ChangeOp, TaxonomyRevision, apply_changelog, record_revision
from .store import Repository, RepositoryConfig, Workspace, init_repo
from .taxonomy import Category, Characteristic, Dimension, Taxonomy
from .tracegraph import DeclaredBy

SCENARIO_BASE_MS = 1_700_000_000_000
_STEP_MS = 60_000

_SCENARIO_SLUGS = (
    "initial-dataset",
    "wrangling-recommendations",
    "feature-set",
    "initial-model-specification",
    "alerts",
)


def scenario_artifact_id(slug: str) -> str:
    return str(uuid.uuid5(uuid.NAMESPACE_URL, f"https://tracelift.example/scenario/{slug}"))


def _cls(**dims: tuple[tuple[str, str], ...]) -> Classification:
    return {dim: frozenset(pairs) for dim, pairs in dims.items()}


@dataclass(frozen=True)
class ScenarioRepo:
    repo: Repository
    ids: dict[str, str]  # catalog type id -> artifact id
    revision_count: int


def build_scenario_repo(path: Path | str) -> ScenarioRepo:
    """Create and populate the demo repository at ``path`` (must not exist)."""
    repo = init_repo(path, RepositoryConfig())
    clock = itertools.count(SCENARIO_BASE_MS, _STEP_MS)
    ids = {slug: scenario_artifact_id(slug) for slug in _SCENARIO_SLUGS}

    with Workspace(repo) as ws:
        ws.create_artifact(
            "initial-dataset",
            "Loan applications, Q3 extract",
            _cls(
                d1=(("cat1.2", "c1.2.1"),),
                d2=(("cat2.1", "c2.1.1"),),
                d3=(("cat3.2", "c3.2.1"),),
                d4=(("cat4.1", "c4.1.4"),),
            ),
            Provenance(next(clock), Origin.HUMAN, "lead-analyst", "api-dump"),
            artifact_id=ids["initial-dataset"],
        )
        ws.create_artifact(
            "wrangling-recommendations",
            "Suggested wrangling steps",
            _cls(
                d1=(("cat1.3", "c1.3.3"),),
                d2=(("cat2.1", "c2.1.2"),),
                d3=(("cat3.1", "c3.1.2"),),
                d4=(("cat4.1", "c4.1.2"),),
            ),
            Provenance(next(clock), Origin.MACHINE, "automl-platform", "api-dump"),
            artifact_id=ids["wrangling-recommendations"],
        )
        ws.create_artifact(
            "feature-set",
            "Candidate feature set",
            _cls(
                d1=(("cat1.3", "c1.3.1"),),
                d2=(("cat2.1", "c2.1.2"),),
                d3=(("cat3.2", "c3.2.1"),),
                d4=(("cat4.5", "c4.5.1"),),
            ),
            Provenance(next(clock), Origin.MACHINE, "automl-platform", "api-dump"),
            artifact_id=ids["feature-set"],
        )
        ws.add_dependency(
            ids["initial-dataset"],
            ids["wrangling-recommendations"],
            DeclaredBy.MACHINE,
            at=next(clock),
        )
        ws.add_dependency(
            ids["wrangling-recommendations"],
            ids["feature-set"],
            DeclaredBy.MACHINE,
            at=next(clock),
        )
        ws.snapshot("Pilot ingest", next(clock))

        # the analyst rewrites the feature set by hand: same artifact, new source
        ws.classify_artifact(
            ids["feature-set"],
            _cls(
                d1=(("cat1.1", "c1.1.2"),),
                d2=(("cat2.1", "c2.1.2"),),
                d3=(("cat3.2", "c3.2.1"),),
                d4=(("cat4.5", "c4.5.1"),),
            ),
            at=next(clock),
        )
        ws.create_artifact(
            "initial-model-specification",
            "Initial model specification",
            _cls(
                d1=(("cat1.3", "c1.3.1"),),
                d2=(("cat2.1", "c2.1.2"),),
                d3=(("cat3.3", "c3.3.1"),),
                d4=(("cat4.5", "c4.5.1"),),
            ),
            Provenance(next(clock), Origin.MACHINE, "automl-platform", "api-dump"),
            artifact_id=ids["initial-model-specification"],
        )
        ws.add_dependency(
            ids["feature-set"],
            ids["initial-model-specification"],
            DeclaredBy.HUMAN,
            at=next(clock),
        )
        ws.snapshot("Feature rework", next(clock))

        ws.create_artifact(
            "alerts",
            "Deployment alert feed",
            _cls(
                d1=(("cat1.4", "c1.4.3"),),
                d2=(("cat2.1", "c2.1.2"),),
                d3=(("cat3.1", "c3.1.2"),),
                d4=(("cat4.1", "c4.1.1"),),
            ),
            Provenance(next(clock), Origin.MACHINE, "monitoring-service", "api-dump"),
            artifact_id=ids["alerts"],
        )
        ws.add_dependency(
            ids["initial-model-specification"],
            ids["alerts"],
            DeclaredBy.INFERRED,
            at=next(clock),
        )
        ws.snapshot("Deployment watch", next(clock))

        # a quiet revision: nothing moved, every version is carried over
        ws.snapshot("Steady state", next(clock))

    return ScenarioRepo(repo=repo, ids=ids, revision_count=4)


# --- taxonomy iteration fixture ------------------------------------------------


def _char(char_id: str, name: str) -> dict:
    return {"id": char_id, "name": name, "description": ""}


def _workshop_base() -> Taxonomy:
    return Taxonomy(
        version_label="workshop/1",
        meta_characteristic=(
            "Work products exchanged between an analyst and an automated"
            " assistant during a modeling workshop."
        ),
        dimensions=(
            Dimension(
                id="dA",
                name="Actor",
                question="Who produced the work product?",
                categories=(
                    Category(
                        id="cA1",
                        name="Person",
                        characteristics=(
                            Characteristic("chA1a", "Expert"),
                            Characteristic("chA1b", "Novice"),
                        ),
                    ),
                    Category(
                        id="cA2",
                        name="Tool",
                        characteristics=(
                            Characteristic("chA2a", "Script"),
                            Characteristic("chA2b", "Service"),
                        ),
                    ),
                ),
            ),
            Dimension(
                id="dB",
                name="Form",
                question="What shape does the work product take?",
                categories=(
                    Category(
                        id="cB1",
                        name="Text",
                        characteristics=(
                            Characteristic("chB1a", "Note"),
                            Characteristic("chB1b", "Summary"),
                        ),
                    ),
                    Category(
                        id="cB2",
                        name="Data",
                        characteristics=(
                            Characteristic("chB2a", "Table"),
                            Characteristic("chB2b", "Series"),
                        ),
                    ),
                ),
            ),
        ),
    )


def build_taxonomy_iterations() -> list[TaxonomyRevision]:
    """Eight recorded revisions; end conditions are met only for (7, 8)."""
    objects = {
        "o1": _cls(dA=(("cA1", "chA1a"),), dB=(("cB1", "chB1a"),)),
        "o2": _cls(dA=(("cA1", "chA1b"),), dB=(("cB1", "chB1b"),)),
        "o3": _cls(dA=(("cA2", "chA2a"),), dB=(("cB2", "chB2a"),)),
        "o4": _cls(dA=(("cA2", "chA2b"),), dB=(("cB2", "chB2b"),)),
    }
    taxonomy = _workshop_base()
    revisions = [record_revision(None, taxonomy, [], objects)]

    def advance(changelog: list[ChangeOp], objects_after: dict[str, Classification]) -> None:
        nonlocal taxonomy
        taxonomy = apply_changelog(taxonomy, changelog)
        revisions.append(record_revision(revisions[-1], taxonomy, changelog, objects_after))

    # rev 2: a new data shape turns up in the captures
    advance(
        [ChangeOp(ChangeKind.ADD, "chB2c", {"node": _char("chB2c", "Matrix"), "parent": "cB2"})],
        objects,
    )

    # rev 3: better category name, and o3 actually was a matrix
    objects = dict(objects)
    objects["o3"] = _cls(dA=(("cA2", "chA2a"),), dB=(("cB2", "chB2c"),))
    advance(
        [
            ChangeOp(ChangeKind.RENAME, "cA2", {"name": "Automation"}),
            ChangeOp(ChangeKind.RECLASSIFY, "o3"),
        ],
        objects,
    )

    # rev 4: expertise level never separated objects — merge the two person
    # characteristics
    objects = dict(objects)
    objects["o1"] = _cls(dA=(("cA1", "chA1m"),), dB=(("cB1", "chB1a"),))
    objects["o2"] = _cls(dA=(("cA1", "chA1m"),), dB=(("cB1", "chB1b"),))
    advance(
        [
            ChangeOp(
                ChangeKind.MERGE,
                "chA1m",
                {
                    "sources": ["chA1a", "chA1b"],
                    "node": _char("chA1m", "Practitioner"),
                    "parent": "cA1",
                    "adopt": [],
                },
            ),
            ChangeOp(ChangeKind.RECLASSIFY, "o1"),
            ChangeOp(ChangeKind.RECLASSIFY, "o2"),
        ],
        objects,
    )

    # rev 5: "Summary" hid two distinct shapes — split it
    objects = dict(objects)
    objects["o2"] = _cls(dA=(("cA1", "chA1m"),), dB=(("cB1", "chB1b1"),))
    advance(
        [
            ChangeOp(
                ChangeKind.SPLIT,
                "chB1b",
                {
                    "targets": ["chB1b1", "chB1b2"],
                    "nodes": [_char("chB1b1", "Digest"), _char("chB1b2", "Report")],
                    "parent": "cB1",
                    "adopt": {},
                },
            ),
            ChangeOp(ChangeKind.RECLASSIFY, "o2"),
        ],
        objects,
    )

    # rev 6: a whole new category, plus the object that motivated it
    objects = dict(objects)
    objects["o5"] = _cls(dA=(("cA2", "chA2a"),), dB=(("cB3", "chB3a"),))
    advance(
        [
            ChangeOp(
                ChangeKind.ADD,
                "cB3",
                {
                    "node": {
                        "id": "cB3",
                        "name": "Media",
                        "characteristics": [_char("chB3a", "Image"), _char("chB3b", "Audio")],
                    },
                    "parent": "dB",
                },
            )
        ],
        objects,
    )

    # rev 7: drop the speculative audio characteristic; o6 covers the gaps
    objects = dict(objects)
    objects["o6"] = _cls(dA=(("cA1", "chA1m"),), dB=(("cB1", "chB1b2"), ("cB2", "chB2a")))
    advance([ChangeOp(ChangeKind.REMOVE, "chB3b")], objects)

    # rev 8: a full pass changes nothing — the taxonomy has settled
    advance([], objects)

    return revisions
