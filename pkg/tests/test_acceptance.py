"""One test per shipping criterion; `pytest -v` prints one pass/fail line each.

Randomized checks use fixed seeds so failures reproduce exactly; every
budgeted test asserts its own wall-clock limit.
"""

import random
import time

from oracles import reachable_from, tally_coverage, topological_order
from tracelift.artifact import (
    ArtifactRecord,
    Origin,
    Provenance,
    load_artifact_catalog,
)
from tracelift.evolution import evaluate_end_conditions
from tracelift.query_export import RepoView
from tracelift.sampledata import build_taxonomy_iterations
from tracelift.store import Workspace, init_repo, replay
from tracelift.taxonomy import load_bundled_taxonomy, validate_taxonomy
from tracelift.tracegraph import DeclaredBy, GraphError, TraceGraph, VersionStatus

from test_artifact import FULL

_PROV = Provenance(1, Origin.HUMAN, "oracle", "api-dump")


def test_bundled_taxonomy_structure_and_validation():
    started = time.monotonic()
    taxonomy = load_bundled_taxonomy()
    assert len(taxonomy.dimensions) == 4
    assert [len(d.categories) for d in taxonomy.dimensions] == [5, 2, 4, 5]
    assert [sum(len(c.characteristics) for c in d.categories) for d in taxonomy.dimensions] == [
        12, 4, 9, 14,
    ]
    total_cats = sum(len(d.categories) for d in taxonomy.dimensions)
    total_chars = len(taxonomy.characteristic_ids())
    # The dataset's own headline summary advertises 17 categories and 41
    # characteristics, but its full enumeration lists 16 and 39. The bundle
    # ships the enumeration; both counts are asserted here so the discrepancy
    # stays visible instead of being quietly normalized away.
    assert (total_cats, total_chars) == (16, 39)
    assert (total_cats, total_chars) != (17, 41)
    report = validate_taxonomy(taxonomy, "strict")
    assert report.ok and report.violations == ()
    assert time.monotonic() - started < 1.0


def test_artifact_catalog_groups_and_types():
    started = time.monotonic()
    groups, types = load_artifact_catalog()
    assert len(groups) == 11
    assert len(types) == 52
    group_ids = {g.id for g in groups}
    assert len(group_ids) == 11
    assert all(t.group in group_ids for t in types)
    assert len({t.id for t in types}) == 52
    # every group actually holds at least one type
    assert {t.group for t in types} == group_ids
    assert time.monotonic() - started < 1.0


def test_end_conditions_met_only_at_the_settled_pair():
    started = time.monotonic()
    revisions = build_taxonomy_iterations()
    assert [rev.index for rev in revisions] == list(range(1, 9))
    for prev, curr in zip(revisions, revisions[1:]):
        report = evaluate_end_conditions(prev, curr)
        assert report.met == (curr.index == 8), f"pair ({prev.index},{curr.index})"
        oracle = tally_coverage(curr.taxonomy, curr.object_classifications)
        assert report.uncovered_characteristics == tuple(
            sorted(char_id for char_id, count in oracle.items() if count == 0)
        )
    assert time.monotonic() - started < 1.0


def _graph_of(n: int) -> TraceGraph:
    graph = TraceGraph()
    for i in range(n):
        graph.add_artifact(ArtifactRecord(f"n{i}", "initial-dataset", "t", FULL, _PROV))
    return graph


def test_closure_and_cycle_checks_match_graph_oracles():
    started = time.monotonic()
    rng = random.Random(0x5EED)
    for trial in range(1_000):
        if trial % 10 == 0:
            n, attempts = rng.randint(50, 200), rng.randint(200, 1_000)
        else:
            n, attempts = rng.randint(2, 30), rng.randint(2, 90)
        graph = _graph_of(n)
        nodes = [f"n{i}" for i in range(n)]
        adjacency: dict[str, set[str]] = {}
        accepted: set[tuple[str, str]] = set()
        cycle_checks = 0
        for _ in range(attempts):
            a, b = nodes[rng.randrange(n)], nodes[rng.randrange(n)]
            try:
                graph.add_dependency(a, b, DeclaredBy.MACHINE)
            except GraphError as err:
                if err.code == "cycle":
                    if cycle_checks < 50:  # keep the oracle affordable on dense graphs
                        assert a in reachable_from(adjacency, b)
                        cycle_checks += 1
                elif err.code == "self-loop":
                    assert a == b
                else:
                    assert err.code == "duplicate-edge" and (a, b) in accepted
            else:
                accepted.add((a, b))
                adjacency.setdefault(a, set()).add(b)
        # anything the graph accepted must still sort topologically
        assert topological_order(nodes, accepted) is not None
        reverse: dict[str, set[str]] = {}
        for a, b in accepted:
            reverse.setdefault(b, set()).add(a)
        for probe in rng.sample(nodes, min(3, n)):
            assert set(graph.closure(probe, "downstream")) == reachable_from(adjacency, probe)
            assert set(graph.closure(probe, "upstream")) == reachable_from(reverse, probe)
    assert time.monotonic() - started < 30.0


def test_version_invariants_hold_on_randomized_snapshots():
    started = time.monotonic()
    rng = random.Random(0xB00C)
    for _ in range(500):
        artifact_count = rng.randint(1, 8)
        graph = _graph_of(artifact_count)
        nodes = [f"n{i}" for i in range(artifact_count)]
        introduced: set[str] = set()
        revision_count = rng.randint(1, 10)
        for index in range(1, revision_count + 1):
            changes = {}
            for node in nodes:
                if node not in introduced:
                    if rng.random() < 0.5:
                        changes[node] = (VersionStatus.NEW, f"h{rng.getrandbits(32):08x}", FULL)
                        introduced.add(node)
                else:
                    roll = rng.random()
                    previous_hash = graph.history(node)[-1].content_hash
                    if roll < 0.3:
                        fresh = f"h{rng.getrandbits(32):08x}"
                        while fresh == previous_hash:  # pragma: no cover - 2^-32 chance
                            fresh = f"h{rng.getrandbits(32):08x}"
                        changes[node] = (VersionStatus.MODIFIED, fresh, FULL)
                    elif roll < 0.4:  # explicit carry-over instead of auto-fill
                        changes[node] = (VersionStatus.UNCHANGED, previous_hash, FULL)
            graph.snapshot_revision(f"r{index}", changes, index * 10)

        assert len(graph.revisions) == revision_count
        last = graph.revisions[-1].index
        for node in nodes:
            history = graph.history(node)
            if node not in introduced:
                assert history == []
                continue
            first = history[0].revision
            # auto-fill totality: exactly one version per revision since birth
            assert [v.revision for v in history] == list(range(first, last + 1))
            assert history[0].status == VersionStatus.NEW
            for earlier, later in zip(history, history[1:]):
                same_hash = later.content_hash == earlier.content_hash
                assert (later.status == VersionStatus.UNCHANGED) == same_hash
        for index in range(1, last + 1):
            row = graph.versions_at(index)
            expected = {n for n in introduced if graph.history(n)[0].revision <= index}
            assert {v.artifact_id for v in row} == expected
    assert time.monotonic() - started < 30.0


_CLASSIFICATION_VARIANTS = [
    FULL,
    {**FULL, "d1": frozenset({("cat1.1", "c1.1.2")})},
    {**FULL, "d1": frozenset({("cat1.3", "c1.3.1")})},
    {**FULL, "d4": frozenset({("cat4.5", "c4.5.1")})},
    {"d1": frozenset({("cat1.4", "c1.4.3")})},
    {},
]
_TYPE_ROTATION = ["initial-dataset", "feature-set", "alerts", "analysis-goals", "data-schema"]


def test_store_replay_and_export_are_deterministic(tmp_path):
    started = time.monotonic()
    rng = random.Random(0xCAFE)
    sizes = [500, 500] + [rng.randint(20, 120) for _ in range(98)]
    for stream, target_events in enumerate(sizes):
        repo = init_repo(tmp_path / f"stream-{stream:03d}")
        clock = 1_000_000
        with Workspace(repo) as ws:
            created: list[str] = []
            while ws.state.last_seq < target_events:
                clock += 1_000
                op = rng.random()
                if op < 0.35 or not created:
                    artifact_id = f"s{stream}-a{len(created)}"
                    ws.create_artifact(
                        _TYPE_ROTATION[len(created) % len(_TYPE_ROTATION)],
                        f"artifact {len(created)}",
                        dict(rng.choice(_CLASSIFICATION_VARIANTS)),
                        Provenance(clock, rng.choice((Origin.HUMAN, Origin.MACHINE)), "gen", "api-dump"),
                        allow_partial=True,
                        artifact_id=artifact_id,
                    )
                    created.append(artifact_id)
                elif op < 0.55:
                    ws.classify_artifact(
                        rng.choice(created), dict(rng.choice(_CLASSIFICATION_VARIANTS)), at=clock
                    )
                elif op < 0.75 and len(created) > 1:
                    try:
                        ws.add_dependency(
                            rng.choice(created), rng.choice(created), DeclaredBy.MACHINE, at=clock
                        )
                    except GraphError:
                        pass  # self-loops, duplicates, cycles: rejected without a trace
                elif op < 0.85:
                    ws.attach_blob(rng.getrandbits(64).to_bytes(8, "big"), at=clock)
                else:
                    ws.snapshot(f"r{len(ws.state.graph.revisions) + 1}", created_at=clock)
            if not ws.state.graph.revisions:
                ws.snapshot("final", created_at=clock + 1_000)
            live = ws.state

        replayed = replay(repo)
        assert replayed.graph.records == live.graph.records
        assert replayed.graph.edges == live.graph.edges
        assert replayed.graph.revisions == live.graph.revisions
        assert replayed.graph._versions == live.graph._versions
        assert replayed.blob_hashes == live.blob_hashes
        assert (replayed.last_seq, replayed.last_at) == (live.last_seq, live.last_at)

        first = RepoView.open(repo).export_view_bundle(repo, tmp_path / f"out-{stream}-a.json")
        second = RepoView.open(repo).export_view_bundle(repo, tmp_path / f"out-{stream}-b.json")
        assert first.read_bytes() == second.read_bytes()
    assert time.monotonic() - started < 60.0


def test_collaboration_scenario_is_fully_traceable(scenario):
    view = RepoView.open(scenario.repo)
    graph = view.state.graph
    taxonomy = view.state.active_taxonomy

    for artifact_id in scenario.ids.values():
        report = graph.is_traceable(artifact_id, taxonomy)
        assert report.traceable, report.missing

    delta = view.compare_history(scenario.ids["feature-set"], 1, 2)
    assert (delta.origin_a, delta.origin_b) == (Origin.MACHINE, Origin.HUMAN)
    assert (delta.status_a, delta.status_b) == (VersionStatus.NEW, VersionStatus.MODIFIED)

    bundle = view.build_view_bundle()
    assert len(bundle["history_view"]["rows"]) == 4
    assert bundle["dependency_view"]["order"] == [
        scenario.ids["initial-dataset"],
        scenario.ids["wrangling-recommendations"],
        scenario.ids["feature-set"],
        scenario.ids["initial-model-specification"],
        scenario.ids["alerts"],
    ]
