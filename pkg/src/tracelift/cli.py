"""Command-line front door.

Exit codes: 0 ok, 1 validation failure, 2 usage error, 3 I/O or repository
integrity error. Every command accepts --json for canonical machine-readable
output (stable across runs on identical state). The repository path comes
from TRACELIFT_REPO when set, else --repo, else the working directory.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import canonical
from .artifact import (
    CatalogError,
    Classification,
    ClassificationError,
    Origin,
    Phase,
    classification_to_dict,
)
from .evolution import (
    EvolutionError,
    SUBJECTIVE_CHECKLIST,
    TaxonomyRevision,
    change_op_from_dict,
    coverage_report,
    evaluate_end_conditions,
)
from .query_export import Filter, QueryError, RepoView
from .store import (
    CaptureFile,
    Demarcation,
    RepositoryConfig,
    StoreError,
    Workspace,
    init_repo,
    open_repo,
)
from .taxonomy import (
    Taxonomy,
    TaxonomyDataError,
    diff_taxonomies,
    load_bundled_taxonomy,
    parse_taxonomy,
    taxonomy_to_dict,
    validate_taxonomy,
)
from .tracegraph import DeclaredBy, GraphError

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2
EXIT_IO = 3

# repository problems that are environmental rather than domain validation
_IO_STORE_CODES = {"not-a-repository", "log-corrupt", "locked", "bad-config"}


class UsageError(ValueError):
    """Bad flag values we parse ourselves (argparse handles the rest)."""


def _repo_path(args: argparse.Namespace) -> Path:
    env = os.environ.get("TRACELIFT_REPO")
    if env:
        return Path(env)
    if args.repo:
        return Path(args.repo)
    return Path(".")


def _emit(args: argparse.Namespace, payload: object, human: list[str]) -> None:
    if args.json:
        print(canonical.dumps(payload))
    else:
        for line in human:
            print(line)


def _parse_set_flags(pairs: list[str]) -> Classification:
    """--set d1=cat1.2:c1.2.1 (repeatable; same dimension accumulates)."""
    classification: dict[str, set[tuple[str, str]]] = {}
    for raw in pairs:
        head, sep, char_id = raw.partition(":")
        dim_id, eq, cat_id = head.partition("=")
        if not sep or not eq or not dim_id or not cat_id or not char_id:
            raise UsageError(f"--set expects DIMENSION=CATEGORY:CHARACTERISTIC, got {raw!r}")
        classification.setdefault(dim_id, set()).add((cat_id, char_id))
    return {dim: frozenset(pairs) for dim, pairs in classification.items()}


def _load_taxonomy_ref(ref: str, view: RepoView | None) -> Taxonomy:
    """A taxonomy reference is "bundled", a revision index, or a file path."""
    if ref == "bundled":
        return load_bundled_taxonomy()
    if ref.isdigit():
        if view is None:
            raise UsageError("revision references need a repository")
        index = int(ref)
        for revision in view.state.taxonomy_revisions:
            if revision.index == index:
                return revision.taxonomy
        raise QueryError("unknown-id", f"no taxonomy revision {index} in repository")
    path = Path(ref)
    if path.is_file():
        return parse_taxonomy(path.read_text("utf-8"))
    raise UsageError(f"taxonomy reference {ref!r} is not 'bundled', a revision index, or a file")


def _taxonomy_revision_by_index(view: RepoView, index: int) -> TaxonomyRevision:
    for revision in view.state.taxonomy_revisions:
        if revision.index == index:
            return revision
    raise QueryError("unknown-id", f"no taxonomy revision {index} in repository")


# --- command handlers --------------------------------------------------------


def cmd_init(args: argparse.Namespace) -> int:
    config = RepositoryConfig(classification_mode=args.mode)
    repo = init_repo(_repo_path(args), config)
    _emit(
        args,
        {"classification_mode": args.mode, "repo": str(repo.root)},
        [f"initialized repository at {repo.root} (mode: {args.mode})"],
    )
    return EXIT_OK


def cmd_taxonomy_validate(args: argparse.Namespace) -> int:
    view = RepoView.open(open_repo(_repo_path(args))) if args.ref.isdigit() else None
    taxonomy = _load_taxonomy_ref(args.ref, view)
    mode = "descriptive" if args.descriptive else "strict"
    report = validate_taxonomy(taxonomy, mode)
    payload = {
        "mode": mode,
        "ok": report.ok,
        "violations": [
            {"message": v.message, "path": v.path, "rule": v.rule} for v in report.violations
        ],
    }
    human = [f"{taxonomy.version_label}: {'ok' if report.ok else 'INVALID'} ({mode} mode)"]
    human += [f"  {v.rule} at {v.path}: {v.message}" for v in report.violations]
    _emit(args, payload, human)
    return EXIT_OK if report.ok else EXIT_VALIDATION


def cmd_taxonomy_diff(args: argparse.Namespace) -> int:
    needs_repo = args.from_ref.isdigit() or args.to_ref.isdigit()
    view = RepoView.open(open_repo(_repo_path(args))) if needs_repo else None
    diff = diff_taxonomies(
        _load_taxonomy_ref(args.from_ref, view), _load_taxonomy_ref(args.to_ref, view)
    )
    payload = {
        "added": [{"id": e.id, "kind": e.kind, "name": e.name, "parent": e.parent} for e in diff.added],
        "empty": diff.empty,
        "moved": [
            {"id": e.id, "kind": e.kind, "new_parent": e.new_parent, "old_parent": e.old_parent}
            for e in diff.moved
        ],
        "removed": [
            {"id": e.id, "kind": e.kind, "name": e.name, "parent": e.parent} for e in diff.removed
        ],
        "renamed": [
            {"id": e.id, "kind": e.kind, "new_name": e.new_name, "old_name": e.old_name}
            for e in diff.renamed
        ],
    }
    human = []
    for entry in diff.added:
        human.append(f"+ {entry.kind} {entry.id} {entry.name!r}")
    for entry in diff.removed:
        human.append(f"- {entry.kind} {entry.id} {entry.name!r}")
    for entry in diff.renamed:
        human.append(f"~ {entry.kind} {entry.id} renamed {entry.old_name!r} -> {entry.new_name!r}")
    for entry in diff.moved:
        human.append(f"> {entry.kind} {entry.id} moved {entry.old_parent} -> {entry.new_parent}")
    _emit(args, payload, human or ["no structural differences"])
    return EXIT_OK


def cmd_taxonomy_show(args: argparse.Namespace) -> int:
    view = RepoView.open(open_repo(_repo_path(args))) if args.ref.isdigit() else None
    taxonomy = _load_taxonomy_ref(args.ref, view)
    human = [f"{taxonomy.version_label}: {taxonomy.meta_characteristic}"]
    for dim in taxonomy.dimensions:
        human.append(f"{dim.id} {dim.name} — {dim.question}")
        for cat in dim.categories:
            human.append(f"  {cat.id} {cat.name}")
            for char in cat.characteristics:
                human.append(f"    {char.id} {char.name}")
    _emit(args, taxonomy_to_dict(taxonomy), human)
    return EXIT_OK


def _parse_demarcation(raw: str, default_generator: str, default_actor: str) -> Demarcation:
    try:
        doc = canonical.loads(raw)
    except ValueError as exc:
        raise UsageError(f"--demarcation must be a JSON object: {exc}") from exc
    if not isinstance(doc, dict) or not {"selector", "type_id", "title"} <= set(doc):
        raise UsageError("--demarcation needs selector, type_id and title keys")
    classification = None
    if doc.get("classification") is not None:
        from .artifact import classification_from_dict

        classification = classification_from_dict(doc["classification"])
    return Demarcation(
        selector=str(doc["selector"]),
        type_id=str(doc["type_id"]),
        title=str(doc["title"]),
        generator=Origin(str(doc.get("generator", default_generator))),
        classification=classification,
        actor_label=str(doc.get("actor_label", default_actor)),
        notes=str(doc.get("notes", "")),
    )


def cmd_ingest(args: argparse.Namespace) -> int:
    demarcations = tuple(
        _parse_demarcation(raw, args.generator, args.actor_label) for raw in args.demarcation
    )
    capture = CaptureFile(path=Path(args.capture), format=args.format, demarcations=demarcations)
    with Workspace(open_repo(_repo_path(args))) as workspace:
        records = workspace.ingest_capture(capture)
    payload = [
        {
            "artifact_id": r.artifact_id,
            "payload_ref": r.payload_ref,
            "title": r.title,
            "type_id": r.type_id,
        }
        for r in records
    ]
    _emit(args, payload, [f"{r.artifact_id}  {r.type_id}  {r.title}" for r in records])
    return EXIT_OK


def cmd_classify(args: argparse.Namespace) -> int:
    classification = _parse_set_flags(args.set or [])
    with Workspace(open_repo(_repo_path(args))) as workspace:
        record = workspace.classify_artifact(args.artifact_id, classification)
    payload = {
        "artifact_id": record.artifact_id,
        "classification": classification_to_dict(record.classification),
    }
    _emit(args, payload, [f"classified {record.artifact_id}"])
    return EXIT_OK


def cmd_link(args: argparse.Namespace) -> int:
    with Workspace(open_repo(_repo_path(args))) as workspace:
        edge = workspace.add_dependency(
            args.from_id, args.to_id, DeclaredBy(args.declared_by), args.note
        )
    payload = {
        "declared_by": edge.declared_by.value,
        "from": edge.from_id,
        "note": edge.note,
        "to": edge.to_id,
    }
    _emit(args, payload, [f"{edge.from_id} -> {edge.to_id} ({edge.declared_by.value})"])
    return EXIT_OK


def cmd_snapshot(args: argparse.Namespace) -> int:
    with Workspace(open_repo(_repo_path(args))) as workspace:
        revision = workspace.snapshot(args.label, args.at)
        versions = workspace.state.graph.versions_at(revision.index)
    counts = {"modified": 0, "new": 0, "unchanged": 0}
    for version in versions:
        counts[version.status.value] += 1
    payload = {
        "artifacts": len(versions),
        "created_at": revision.created_at,
        "index": revision.index,
        "label": revision.label,
        **counts,
    }
    _emit(
        args,
        payload,
        [
            f"revision {revision.index} {revision.label!r}: {len(versions)} artifacts "
            f"({counts['new']} new, {counts['modified']} modified, {counts['unchanged']} unchanged)"
        ],
    )
    return EXIT_OK


def cmd_revise_taxonomy(args: argparse.Namespace) -> int:
    taxonomy = parse_taxonomy(Path(args.file).read_text("utf-8"))
    changelog = []
    if args.changelog:
        doc = canonical.loads(Path(args.changelog).read_text("utf-8"))
        if not isinstance(doc, list):
            raise UsageError("--changelog file must hold a JSON array of change operations")
        changelog = [change_op_from_dict(op) for op in doc]
    with Workspace(open_repo(_repo_path(args))) as workspace:
        objects = {
            artifact_id: record.classification
            for artifact_id, record in workspace.state.graph.records.items()
        }
        revision = workspace.revise_taxonomy(taxonomy, changelog, objects, lenient=args.lenient)
    payload = {"index": revision.index, "operations": len(changelog)}
    _emit(args, payload, [f"recorded taxonomy revision {revision.index} ({len(changelog)} operations)"])
    return EXIT_OK


def cmd_check_end_conditions(args: argparse.Namespace) -> int:
    view = RepoView.open(open_repo(_repo_path(args)))
    report = evaluate_end_conditions(
        _taxonomy_revision_by_index(view, args.prev),
        _taxonomy_revision_by_index(view, args.curr),
    )
    payload = {
        "cond1_no_changes": report.cond1_no_changes,
        "cond2_no_merge_split": report.cond2_no_merge_split,
        "cond3_full_coverage": report.cond3_full_coverage,
        "met": report.met,
        "subjective_checklist": list(SUBJECTIVE_CHECKLIST),
        "uncovered_characteristics": list(report.uncovered_characteristics),
    }
    human = [
        f"objective end conditions {'met' if report.met else 'NOT met'} "
        f"(revisions {args.prev} -> {args.curr})",
        f"  no structural or classification changes: {report.cond1_no_changes}",
        f"  no merges or splits: {report.cond2_no_merge_split}",
        f"  every characteristic covers an object: {report.cond3_full_coverage}",
    ]
    if report.uncovered_characteristics:
        human.append("  uncovered: " + ", ".join(report.uncovered_characteristics))
    human.append("subjective checklist (judged by the team, not the tool):")
    human += [f"  - {item}" for item in SUBJECTIVE_CHECKLIST]
    _emit(args, payload, human)
    return EXIT_OK if report.met else EXIT_VALIDATION


def cmd_coverage(args: argparse.Namespace) -> int:
    view = RepoView.open(open_repo(_repo_path(args)))
    if args.rev is not None:
        revision = _taxonomy_revision_by_index(view, args.rev)
    elif view.state.taxonomy_revisions:
        revision = view.state.taxonomy_revisions[-1]
    else:
        # no recorded taxonomy work yet: tally live records against the bundle
        revision = TaxonomyRevision(
            index=0,
            taxonomy=view.state.active_taxonomy,
            changelog=(),
            object_classifications={
                artifact_id: record.classification
                for artifact_id, record in view.state.graph.records.items()
            },
        )
    counts = coverage_report(revision)
    uncovered = [char_id for char_id, count in counts.items() if count == 0]
    payload = {"counts": counts, "revision": revision.index, "uncovered": uncovered}
    human = [f"characteristic coverage at taxonomy revision {revision.index}:"]
    human += [f"  {char_id}: {count}" for char_id, count in counts.items()]
    _emit(args, payload, human)
    return EXIT_OK


def cmd_locate(args: argparse.Namespace) -> int:
    view = RepoView.open(open_repo(_repo_path(args)))
    summaries = view.locate(
        Filter(
            phase=Phase(args.phase) if args.phase else None,
            group=args.group,
            type_id=args.type,
            origin=Origin(args.origin) if args.origin else None,
            dimension=args.dimension,
            category=args.category,
            characteristic=args.characteristic,
            rev_min=args.rev_min,
            rev_max=args.rev_max,
        )
    )
    payload = [
        {
            "artifact_id": s.artifact_id,
            "group": s.group_id,
            "origin": s.origin.value if s.origin else None,
            "phase": s.phase.value,
            "seq": s.seq,
            "title": s.title,
            "type_id": s.type_id,
        }
        for s in summaries
    ]
    human = [
        f"{s.artifact_id}  {s.phase.value}/{s.group_id}/{s.type_id}  "
        f"[{s.origin.value if s.origin else '?'}]  {s.title}"
        for s in summaries
    ]
    _emit(args, payload, human or ["no artifacts match"])
    return EXIT_OK


def cmd_summarize(args: argparse.Namespace) -> int:
    view = RepoView.open(open_repo(_repo_path(args)))
    card = view.summarize(args.artifact_id)
    payload = {
        "artifact_id": card.summary.artifact_id,
        "classification": classification_to_dict(card.classification),
        "downstream": list(card.downstream),
        "group": card.summary.group_id,
        "origin": card.summary.origin.value if card.summary.origin else None,
        "peers": {char_id: list(ids) for char_id, ids in card.peers.items()},
        "phase": card.summary.phase.value,
        "title": card.summary.title,
        "type_id": card.summary.type_id,
        "upstream": list(card.upstream),
    }
    human = [
        f"{card.summary.title} ({card.summary.type_id}, {card.summary.phase.value})",
        f"  origin: {card.summary.origin.value if card.summary.origin else 'underivable'}",
        "  classification: "
        + (
            "; ".join(
                f"{dim}={cat}:{char}"
                for dim, pairs in sorted(card.classification.items())
                for cat, char in sorted(pairs)
            )
            or "(none)"
        ),
        f"  upstream: {', '.join(card.upstream) or '(none)'}",
        f"  downstream: {', '.join(card.downstream) or '(none)'}",
    ]
    for char_id, ids in card.peers.items():
        human.append(f"  peers via {char_id}: {', '.join(ids) or '(none)'}")
    _emit(args, payload, human)
    return EXIT_OK


def cmd_history(args: argparse.Namespace) -> int:
    view = RepoView.open(open_repo(_repo_path(args)))
    if args.artifact_id not in view.state.graph.records:
        raise QueryError("unknown-artifact", f"artifact {args.artifact_id!r} not in repository")
    versions = view.state.graph.history(args.artifact_id)
    payload = [
        {
            "content_hash": v.content_hash,
            "revision": v.revision,
            "status": v.status.value,
        }
        for v in versions
    ]
    human = [f"rev {v.revision}: {v.status.value}  {v.content_hash[:12]}" for v in versions]
    _emit(args, payload, human or ["no versions (snapshot a revision first)"])
    return EXIT_OK


def cmd_export(args: argparse.Namespace) -> int:
    repo = open_repo(_repo_path(args))
    view = RepoView.open(repo)
    target = view.export_view_bundle(repo, Path(args.out) if args.out else None)
    digest = canonical.sha256_hex(target.read_bytes())
    _emit(args, {"path": str(target), "sha256": digest}, [f"wrote {target} ({digest[:12]})"])
    return EXIT_OK


# --- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--repo", help="repository path (TRACELIFT_REPO wins when set)")
    shared.add_argument("--json", action="store_true", help="canonical JSON output")

    parser = argparse.ArgumentParser(prog="tracelift", description=__doc__)
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("init", parents=[shared], help="create an empty repository")
    p.add_argument("--mode", choices=("strict", "descriptive"), default="descriptive")
    p.set_defaults(handler=cmd_init)

    taxonomy = commands.add_parser("taxonomy", help="inspect and compare taxonomies")
    tax_commands = taxonomy.add_subparsers(dest="taxonomy_command", required=True)

    p = tax_commands.add_parser("validate", parents=[shared])
    p.add_argument("ref", nargs="?", default="bundled", help="'bundled', revision index, or file")
    mode_group = p.add_mutually_exclusive_group()
    mode_group.add_argument("--strict", action="store_true", default=True)
    mode_group.add_argument("--descriptive", action="store_true")
    p.set_defaults(handler=cmd_taxonomy_validate)

    p = tax_commands.add_parser("diff", parents=[shared])
    p.add_argument("--from", dest="from_ref", required=True)
    p.add_argument("--to", dest="to_ref", required=True)
    p.set_defaults(handler=cmd_taxonomy_diff)

    p = tax_commands.add_parser("show", parents=[shared])
    p.add_argument("ref", nargs="?", default="bundled")
    p.set_defaults(handler=cmd_taxonomy_show)

    p = commands.add_parser("ingest", parents=[shared], help="demarcate a capture file")
    p.add_argument("capture")
    p.add_argument("--format", choices=("json", "image"), required=True)
    p.add_argument(
        "--demarcation",
        action="append",
        required=True,
        help='JSON object: {"selector": …, "type_id": …, "title": …, …}',
    )
    p.add_argument("--generator", choices=("human", "machine"), default="machine")
    p.add_argument("--actor-label", default="")
    p.set_defaults(handler=cmd_ingest)

    p = commands.add_parser("classify", parents=[shared], help="replace an artifact's classification")
    p.add_argument("artifact_id")
    p.add_argument("--set", action="append", metavar="DIM=CAT:CHAR")
    p.set_defaults(handler=cmd_classify)

    p = commands.add_parser("link", parents=[shared], help="declare a dependency edge")
    p.add_argument("from_id")
    p.add_argument("to_id")
    p.add_argument("--declared-by", choices=("human", "machine", "inferred"), default="human")
    p.add_argument("--note", default="")
    p.set_defaults(handler=cmd_link)

    p = commands.add_parser("snapshot", parents=[shared], help="record a revision of every artifact")
    p.add_argument("label")
    p.add_argument("--at", type=int, help="timestamp ms; default now")
    p.set_defaults(handler=cmd_snapshot)

    p = commands.add_parser("revise-taxonomy", parents=[shared], help="record a taxonomy revision")
    p.add_argument("--file", required=True, help="taxonomy JSON")
    p.add_argument("--changelog", help="JSON array of change operations")
    p.add_argument("--lenient", action="store_true")
    p.set_defaults(handler=cmd_revise_taxonomy)

    p = commands.add_parser(
        "check-end-conditions", parents=[shared], help="objective stop criteria between revisions"
    )
    p.add_argument("--prev", type=int, required=True)
    p.add_argument("--curr", type=int, required=True)
    p.set_defaults(handler=cmd_check_end_conditions)

    p = commands.add_parser("coverage", parents=[shared], help="objects per characteristic")
    p.add_argument("--rev", type=int)
    p.set_defaults(handler=cmd_coverage)

    p = commands.add_parser("locate", parents=[shared], help="filter artifacts")
    p.add_argument("--phase", choices=[phase.value for phase in Phase])
    p.add_argument("--group")
    p.add_argument("--type")
    p.add_argument("--origin", choices=("human", "machine"))
    p.add_argument("--dimension")
    p.add_argument("--category")
    p.add_argument("--characteristic")
    p.add_argument("--rev-min", type=int)
    p.add_argument("--rev-max", type=int)
    p.set_defaults(handler=cmd_locate)

    p = commands.add_parser("summarize", parents=[shared], help="info card for one artifact")
    p.add_argument("artifact_id")
    p.set_defaults(handler=cmd_summarize)

    p = commands.add_parser("history", parents=[shared], help="version row for one artifact")
    p.add_argument("artifact_id")
    p.set_defaults(handler=cmd_history)

    p = commands.add_parser("export", parents=[shared], help="write the view bundle")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_export)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse prints its own message
        code = exc.code
        return code if isinstance(code, int) else EXIT_USAGE
    try:
        return args.handler(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except StoreError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO if exc.code in _IO_STORE_CODES else EXIT_VALIDATION
    except (
        ClassificationError,
        CatalogError,
        GraphError,
        EvolutionError,
        QueryError,
        TaxonomyDataError,
        canonical.CanonicalError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
