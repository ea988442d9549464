"""Taxonomy revisions and iteration end conditions.

Each revision carries the full taxonomy, a changelog of explicit change
operations, and the classification of development objects under that
taxonomy. The changelog must account for the structural diff against the
previous revision: every delta claimed by exactly one operation, every
operation matching a real delta. Merge and Split are deliberate,
first-class operations because they cannot be inferred from deltas
unambiguously — expressing them as remove+add is accepted only in lenient
mode (and then the no-merge/split end condition cannot see them).

Iteration stops when three conditions hold between adjacent revisions:
no structural or object changes, no merge/split operations, and every
characteristic covering at least one classified object.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Sequence

from .artifact import Classification, classification_from_dict, classification_to_dict
from .taxonomy import (
    Taxonomy,
    TaxonomyDiff,
    diff_taxonomies,
    taxonomy_from_dict,
    taxonomy_to_dict,
)


class ChangeKind(str, Enum):
    ADD = "add"
    REMOVE = "remove"
    RENAME = "rename"
    MERGE = "merge"
    SPLIT = "split"
    RECLASSIFY = "reclassify"


class EvolutionError(ValueError):
    def __init__(self, code: str, message: str, details: list[str] | None = None):
        super().__init__(message)
        self.code = code
        self.details = details or []


@dataclass(frozen=True)
class ChangeOp:
    """One declared change.

    kind/subject/detail semantics:
      add        subject = new node id; detail {"node": subtree, "parent": id|None}
      remove     subject = removed node id (claims its whole removed subtree)
      rename     subject = node id; detail {"name": new name}
      merge      subject = target node id; detail {"sources": [ids],
                 "node": subtree (when the target is new), "parent": id,
                 "adopt": [ids re-homed into the target]}
      split      subject = source node id; detail {"targets": [ids],
                 "nodes": [subtrees], "parent": id, "adopt": {target: [ids]}}
      reclassify subject = moved node id with detail {"parent": new parent}, or
                 subject = object id whose classification changed (no detail)
    """

    kind: ChangeKind
    subject: str
    detail: dict = field(default_factory=dict)


@dataclass(frozen=True)
class TaxonomyRevision:
    index: int
    taxonomy: Taxonomy
    changelog: tuple[ChangeOp, ...]
    object_classifications: dict[str, Classification]


@dataclass(frozen=True)
class EndConditionReport:
    cond1_no_changes: bool
    cond2_no_merge_split: bool
    cond3_full_coverage: bool
    uncovered_characteristics: tuple[str, ...]

    @property
    def met(self) -> bool:
        return self.cond1_no_changes and self.cond2_no_merge_split and self.cond3_full_coverage


SUBJECTIVE_CHECKLIST: tuple[str, ...] = (
    "concise: few enough dimensions to hold in mind at once",
    "robust: dimensions and characteristics separate objects of interest",
    "comprehensive: every known object can be classified",
    "extendable: new dimensions or characteristics can be added",
    "explanatory: placements say something useful about an object",
)


# --- changelog accounting ------------------------------------------------------

def _subtree_ids(root: str, children_of: Mapping[str, list[str]]) -> set[str]:
    out = {root}
    stack = [root]
    while stack:
        for child in children_of.get(stack.pop(), ()):  # type: ignore[arg-type]
            if child not in out:
                out.add(child)
                stack.append(child)
    return out


def _claims_for(
    op: ChangeOp,
    diff: TaxonomyDiff,
    added_children: Mapping[str, list[str]],
    removed_children: Mapping[str, list[str]],
) -> set[tuple[str, str]]:
    added_ids = {e.id for e in diff.added}
    removed_ids = {e.id for e in diff.removed}
    moved_by_parent: dict[str, list[str]] = {}
    for m in diff.moved:
        moved_by_parent.setdefault(str(m.new_parent), []).append(m.id)

    claims: set[tuple[str, str]] = set()
    if op.kind == ChangeKind.ADD:
        if op.subject in added_ids:
            claims |= {("added", i) for i in _subtree_ids(op.subject, added_children) & added_ids}
    elif op.kind == ChangeKind.REMOVE:
        if op.subject in removed_ids:
            claims |= {("removed", i) for i in _subtree_ids(op.subject, removed_children) & removed_ids}
    elif op.kind == ChangeKind.RENAME:
        if any(r.id == op.subject for r in diff.renamed):
            claims.add(("renamed", op.subject))
    elif op.kind == ChangeKind.MERGE:
        for source in op.detail.get("sources", []):
            if source in removed_ids:
                claims |= {("removed", i) for i in _subtree_ids(source, removed_children) & removed_ids}
        if op.subject in added_ids:
            claims |= {("added", i) for i in _subtree_ids(op.subject, added_children) & added_ids}
        adopted = op.detail.get("adopt", moved_by_parent.get(op.subject, []))
        claims |= {("moved", i) for i in adopted if any(m.id == i for m in diff.moved)}
    elif op.kind == ChangeKind.SPLIT:
        if op.subject in removed_ids:
            claims |= {("removed", i) for i in _subtree_ids(op.subject, removed_children) & removed_ids}
        targets = op.detail.get("targets", [])
        for target in targets:
            if target in added_ids:
                claims |= {("added", i) for i in _subtree_ids(target, added_children) & added_ids}
        adopt = op.detail.get("adopt")
        if adopt is None:
            adopted = [i for t in targets for i in moved_by_parent.get(t, [])]
        else:
            adopted = [i for ids in adopt.values() for i in ids]
        claims |= {("moved", i) for i in adopted if any(m.id == i for m in diff.moved)}
    elif op.kind == ChangeKind.RECLASSIFY:
        if any(m.id == op.subject for m in diff.moved):
            claims.add(("moved", op.subject))
    return claims


def check_changelog(
    previous: Taxonomy,
    current: Taxonomy,
    changelog: Sequence[ChangeOp],
    prev_objects: Mapping[str, Classification],
    curr_objects: Mapping[str, Classification],
    *,
    lenient: bool = False,
) -> None:
    """Raise EvolutionError unless the changelog explains the diff exactly."""
    diff = diff_taxonomies(previous, current)
    deltas: set[tuple[str, str]] = (
        {("added", e.id) for e in diff.added}
        | {("removed", e.id) for e in diff.removed}
        | {("renamed", e.id) for e in diff.renamed}
        | {("moved", e.id) for e in diff.moved}
    )
    added_children: dict[str, list[str]] = {}
    for e in diff.added:
        if e.parent is not None:
            added_children.setdefault(e.parent, []).append(e.id)
    removed_children: dict[str, list[str]] = {}
    for e in diff.removed:
        if e.parent is not None:
            removed_children.setdefault(e.parent, []).append(e.id)

    claimed: set[tuple[str, str]] = set()
    spurious: list[str] = []
    for op in changelog:
        claims = _claims_for(op, diff, added_children, removed_children)
        if op.kind == ChangeKind.RECLASSIFY and not claims:
            # object-level reclassification: subject's placement must differ
            if prev_objects.get(op.subject) == curr_objects.get(op.subject):
                spurious.append(f"{op.kind.value}:{op.subject}")
            continue
        new_claims = claims - claimed
        if not new_claims:
            spurious.append(f"{op.kind.value}:{op.subject}")
        claimed |= claims

    unexplained = deltas - claimed
    if unexplained:
        listing = sorted(f"{kind}:{node_id}" for kind, node_id in unexplained)
        raise EvolutionError(
            "changelog-incomplete",
            f"structural deltas not explained by any operation: {', '.join(listing)}",
            details=listing,
        )
    if spurious:
        raise EvolutionError(
            "changelog-spurious",
            f"operations with no matching delta: {', '.join(spurious)}",
            details=spurious,
        )
    if not lenient:
        _reject_ambiguous_merge_split(diff, changelog)


def _reject_ambiguous_merge_split(diff: TaxonomyDiff, changelog: Sequence[ChangeOp]) -> None:
    """Plain remove+add among siblings is indistinguishable from an
    undeclared merge or split; demand the explicit operation (or lenient)."""
    plain_removed_parents = set()
    plain_added_parents = set()
    for op in changelog:
        if op.kind == ChangeKind.REMOVE:
            for e in diff.removed:
                if e.id == op.subject and e.parent is not None:
                    plain_removed_parents.add(e.parent)
        elif op.kind == ChangeKind.ADD:
            for e in diff.added:
                if e.id == op.subject and e.parent is not None:
                    plain_added_parents.add(e.parent)
    ambiguous = sorted(plain_removed_parents & plain_added_parents)
    if ambiguous:
        raise EvolutionError(
            "ambiguous-merge-split",
            "sibling add+remove under "
            + ", ".join(ambiguous)
            + " looks like an undeclared merge or split; use an explicit Merge/Split"
            " operation or pass lenient=True",
            details=ambiguous,
        )


# --- revision recording ----------------------------------------------------------

def record_revision(
    previous: TaxonomyRevision | None,
    taxonomy: Taxonomy,
    changelog: Sequence[ChangeOp],
    object_classifications: Mapping[str, Classification],
    *,
    lenient: bool = False,
) -> TaxonomyRevision:
    ids = [i for _, i, _, _ in taxonomy.iter_nodes()]
    if len(ids) != len(set(ids)):
        raise EvolutionError("duplicate-ids", "taxonomy contains duplicate node ids")

    if previous is None:
        if changelog:
            raise EvolutionError(
                "changelog-spurious",
                "the first revision takes the taxonomy as given; its changelog must be empty",
                details=[f"{op.kind.value}:{op.subject}" for op in changelog],
            )
        index = 1
    else:
        check_changelog(
            previous.taxonomy,
            taxonomy,
            changelog,
            previous.object_classifications,
            object_classifications,
            lenient=lenient,
        )
        index = previous.index + 1

    return TaxonomyRevision(
        index=index,
        taxonomy=taxonomy,
        changelog=tuple(changelog),
        object_classifications=dict(object_classifications),
    )


# --- end conditions ----------------------------------------------------------

def evaluate_end_conditions(prev: TaxonomyRevision, curr: TaxonomyRevision) -> EndConditionReport:
    if curr.index != prev.index + 1:
        raise EvolutionError(
            "non-adjacent",
            f"end conditions compare adjacent revisions; got {prev.index} and {curr.index}",
        )
    structural = diff_taxonomies(prev.taxonomy, curr.taxonomy)
    cond1 = structural.empty and prev.object_classifications == curr.object_classifications
    cond2 = not any(op.kind in (ChangeKind.MERGE, ChangeKind.SPLIT) for op in curr.changelog)
    counts = coverage_report(curr)
    uncovered = tuple(sorted(char_id for char_id, n in counts.items() if n == 0))
    return EndConditionReport(
        cond1_no_changes=cond1,
        cond2_no_merge_split=cond2,
        cond3_full_coverage=not uncovered,
        uncovered_characteristics=uncovered,
    )


def coverage_report(rev: TaxonomyRevision) -> dict[str, int]:
    """Object count per characteristic id; zero counts included."""
    counts = {char_id: 0 for char_id in rev.taxonomy.characteristic_ids()}
    for classification in rev.object_classifications.values():
        for pairs in classification.values():
            for _, char_id in pairs:
                if char_id in counts:
                    counts[char_id] += 1
    return counts


# --- changelog application ------------------------------------------------------

def apply_changelog(previous: Taxonomy, changelog: Sequence[ChangeOp]) -> Taxonomy:
    """Transform ``previous`` by the declared operations.

    For any accepted revision, the result is structurally equal to the
    recorded taxonomy (diff empty); ordering and prose metadata may differ.
    """
    root = taxonomy_to_dict(previous)

    def locate(node_id: str):
        """-> (children list containing node, index, node, depth)."""
        stack = [(root["dimensions"], 0)]
        while stack:
            siblings, depth = stack.pop()
            for i, node in enumerate(siblings):
                if node["id"] == node_id:
                    return siblings, i, node, depth
                for key in ("categories", "characteristics"):
                    if key in node:
                        stack.append((node[key], depth + 1))
        raise EvolutionError("unknown-subject", f"node {node_id!r} not found")

    def children_list(parent_id: str | None):
        if parent_id is None:
            return root["dimensions"]
        _, _, parent, depth = locate(parent_id)
        key = "categories" if depth == 0 else "characteristics"
        return parent.setdefault(key, [])

    def insert(node: dict, parent_id: str | None):
        children_list(parent_id).append(copy.deepcopy(node))

    def detach(node_id: str) -> dict:
        siblings, i, node, _ = locate(node_id)
        return siblings.pop(i)

    for op in changelog:
        if op.kind == ChangeKind.ADD:
            insert(op.detail["node"], op.detail.get("parent"))
        elif op.kind == ChangeKind.REMOVE:
            detach(op.subject)
        elif op.kind == ChangeKind.RENAME:
            _, _, node, _ = locate(op.subject)
            node["name"] = op.detail["name"]
        elif op.kind == ChangeKind.MERGE:
            for source in op.detail.get("sources", []):
                detach(source)
            if "node" in op.detail:
                insert(op.detail["node"], op.detail.get("parent"))
            for adopted in op.detail.get("adopt", []):
                node = detach(adopted)
                children_list(op.subject).append(node)
        elif op.kind == ChangeKind.SPLIT:
            detach(op.subject)
            for node in op.detail.get("nodes", []):
                insert(node, op.detail.get("parent"))
            for target, ids in (op.detail.get("adopt") or {}).items():
                for adopted in ids:
                    children_list(target).append(detach(adopted))
        elif op.kind == ChangeKind.RECLASSIFY:
            if "parent" in op.detail:
                node = detach(op.subject)
                children_list(op.detail["parent"]).append(node)
    return taxonomy_from_dict(root)


# --- (de)serialization ----------------------------------------------------------

def change_op_to_dict(op: ChangeOp) -> dict:
    return {"detail": op.detail, "kind": op.kind.value, "subject": op.subject}


def change_op_from_dict(doc: Mapping[str, object]) -> ChangeOp:
    return ChangeOp(
        kind=ChangeKind(doc["kind"]),
        subject=str(doc["subject"]),
        detail=dict(doc.get("detail") or {}),  # type: ignore[arg-type]
    )


def revision_to_dict(rev: TaxonomyRevision) -> dict:
    return {
        "changelog": [change_op_to_dict(op) for op in rev.changelog],
        "index": rev.index,
        "object_classifications": {
            obj: classification_to_dict(c) for obj, c in sorted(rev.object_classifications.items())
        },
        "taxonomy": taxonomy_to_dict(rev.taxonomy),
    }


def revision_from_dict(doc: Mapping[str, object]) -> TaxonomyRevision:
    return TaxonomyRevision(
        index=int(doc["index"]),  # type: ignore[arg-type]
        taxonomy=taxonomy_from_dict(doc["taxonomy"]),  # type: ignore[arg-type]
        changelog=tuple(change_op_from_dict(d) for d in doc["changelog"]),  # type: ignore[union-attr,arg-type]
        object_classifications={
            str(obj): classification_from_dict(c)
            for obj, c in doc["object_classifications"].items()  # type: ignore[union-attr,attr-defined]
        },
    )
