import io

import pytest
from PIL import Image

from tracelift import canonical
from tracelift.artifact import ClassificationError, Origin, Provenance, record_from_dict
from tracelift.store import (
    CaptureFile,
    Demarcation,
    Event,
    Repository,
    RepositoryConfig,
    StoreError,
    Workspace,
    init_repo,
    iter_events,
    open_repo,
    replay,
    resolve_json_selector,
)
from tracelift.tracegraph import DeclaredBy, GraphError

from test_artifact import FULL

EMPTY_SHA256 = "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"


@pytest.fixture
def repo(tmp_path):
    return init_repo(tmp_path / "repo")


def _prov(at, generator=Origin.HUMAN):
    return Provenance(at, generator, "tester", "manual-annotation")


# --- repository layout & config ---------------------------------------------------


def test_init_creates_layout(repo):
    assert repo.config_path.is_file()
    assert repo.events_path.is_file() and repo.events_path.read_bytes() == b""
    for d in (repo.taxonomy_dir, repo.artifacts_dir, repo.blobs_dir, repo.exports_dir):
        assert d.is_dir()
    assert canonical.read_file(repo.config_path)["format"] == "tracelift-repo/1"


def test_init_refuses_non_empty_directory(tmp_path):
    (tmp_path / "stray.txt").write_text("hello")
    with pytest.raises(StoreError) as err:
        init_repo(tmp_path)
    assert err.value.code == "already-initialized"


def test_open_requires_config(tmp_path):
    with pytest.raises(StoreError) as err:
        open_repo(tmp_path / "nowhere")
    assert err.value.code == "not-a-repository"


def test_config_round_trip():
    cfg = RepositoryConfig(classification_mode="strict", data_origin_rule=(("c1.2.1", "machine"), ("c1.2.2", "machine")))
    assert RepositoryConfig.from_dict(cfg.to_dict()) == cfg
    assert cfg.origin_rule()["c1.2.1"] is Origin.MACHINE


@pytest.mark.parametrize(
    "doc,code",
    [
        ({"format": "something-else"}, "not-a-repository"),
        ({"format": "tracelift-repo/1", "classification_mode": "vibes"}, "bad-config"),
        ({"format": "tracelift-repo/1", "data_origin_rule": {"c1.2.1": "alien"}}, "bad-config"),
    ],
)
def test_config_rejects_bad_documents(doc, code):
    with pytest.raises(StoreError) as err:
        RepositoryConfig.from_dict(doc)
    assert err.value.code == code


# --- event log ------------------------------------------------------------------


def test_every_mutation_appends_one_event_with_contiguous_seq(repo):
    with Workspace(repo) as ws:
        a = ws.create_artifact("initial-dataset", "a", dict(FULL), _prov(100), artifact_id="a")
        ws.create_artifact("initial-dataset", "b", dict(FULL), _prov(200), artifact_id="b")
        ws.add_dependency(a.artifact_id, "b", DeclaredBy.HUMAN, at=250)
        ws.snapshot("first", created_at=300)
    events = list(iter_events(repo))
    assert [e.seq for e in events] == [1, 2, 3, 4]
    assert [e.kind for e in events] == [
        "ArtifactCreated",
        "ArtifactCreated",
        "EdgeAdded",
        "RevisionSnapshotted",
    ]


def test_failed_operation_appends_nothing(repo):
    with Workspace(repo) as ws:
        ws.create_artifact("initial-dataset", "a", dict(FULL), _prov(100), artifact_id="a")
        ws.create_artifact("initial-dataset", "b", dict(FULL), _prov(200), artifact_id="b")
        ws.add_dependency("a", "b", DeclaredBy.HUMAN, at=250)
        before = repo.events_path.read_bytes()
        with pytest.raises(GraphError):
            ws.add_dependency("b", "a", DeclaredBy.HUMAN, at=260)  # cycle
        with pytest.raises(GraphError):
            ws.add_dependency("a", "b", DeclaredBy.HUMAN, at=260)  # duplicate
        assert repo.events_path.read_bytes() == before
        assert ws.state.last_seq == 3
        # the workspace is still usable afterwards
        ws.snapshot("still fine", created_at=300)


def test_event_times_never_run_backwards(repo):
    with Workspace(repo) as ws:
        ws.create_artifact("initial-dataset", "a", dict(FULL), _prov(5_000), artifact_id="a")
        ws.classify_artifact("a", dict(FULL), at=1_000)  # claims to be earlier
    events = list(iter_events(repo))
    assert events[0].at == 5_000
    assert events[1].at == 5_000  # clamped, not 1_000


def test_creation_timestamp_regression_rejected(repo):
    with Workspace(repo) as ws:
        ws.create_artifact("initial-dataset", "later", dict(FULL), _prov(9_000), artifact_id="x")
        with pytest.raises(StoreError) as err:
            ws.create_artifact("initial-dataset", "earlier", dict(FULL), _prov(8_000))
        assert err.value.code == "timestamp-regression"


def test_log_corruption_detected(repo):
    with Workspace(repo) as ws:
        ws.create_artifact("initial-dataset", "a", dict(FULL), _prov(100), artifact_id="a")
        ws.create_artifact("initial-dataset", "b", dict(FULL), _prov(200), artifact_id="b")

    lines = repo.events_path.read_text().splitlines(keepends=True)
    doctored = Event.from_line(lines[1].rstrip("\n"))
    lines[1] = Event(seq=7, at=doctored.at, kind=doctored.kind, body=doctored.body).to_line()
    repo.events_path.write_text("".join(lines))
    with pytest.raises(StoreError) as err:
        replay(repo)
    assert err.value.code == "log-corrupt"

    repo.events_path.write_text("".join(lines[:1]) + '{"truncated": ')
    with pytest.raises(StoreError) as err:
        replay(repo)
    assert err.value.code == "log-corrupt"


def test_unknown_event_kind_is_corruption(repo):
    repo.events_path.write_text('{"at":1,"body":{},"kind":"Mystery","seq":1}\n')
    with pytest.raises(StoreError) as err:
        replay(repo)
    assert err.value.code == "log-corrupt"


def test_second_writer_times_out(repo):
    with Workspace(repo):
        with pytest.raises(StoreError) as err:
            Workspace(repo, lock_timeout=0.05)
        assert err.value.code == "locked"
    # released on close
    Workspace(repo).close()


# --- replay -----------------------------------------------------------------------


def test_replay_reproduces_live_state(repo):
    with Workspace(repo) as ws:
        ws.create_artifact("initial-dataset", "a", dict(FULL), _prov(100), artifact_id="a")
        ws.create_artifact("analysis-goals", "b", {}, _prov(200), allow_partial=True, artifact_id="b")
        ws.add_dependency("a", "b", DeclaredBy.MACHINE, note="derived", at=250)
        ws.attach_blob(b"payload", at=260)
        ws.snapshot("r1", created_at=300)
        ws.classify_artifact("b", dict(FULL), at=400)
        ws.snapshot("r2", created_at=500)
        live = ws.state

    state = replay(repo)
    assert state.graph.records == live.graph.records
    assert state.graph.edges == live.graph.edges
    assert state.graph.revisions == live.graph.revisions
    assert state.graph._versions == live.graph._versions
    assert state.blob_hashes == live.blob_hashes
    assert (state.last_seq, state.last_at) == (live.last_seq, live.last_at)


def test_materialized_artifact_files_parse(repo):
    with Workspace(repo) as ws:
        record = ws.create_artifact("initial-dataset", "a", dict(FULL), _prov(100), artifact_id="a")
    on_disk = record_from_dict(canonical.read_file(repo.artifact_path("a")))
    assert on_disk == record


def test_classify_unknown_artifact(repo):
    with Workspace(repo) as ws:
        with pytest.raises(StoreError) as err:
            ws.classify_artifact("ghost", dict(FULL))
        assert err.value.code == "unknown-artifact"


def test_create_unknown_type(repo):
    with Workspace(repo) as ws:
        with pytest.raises(ClassificationError) as err:
            ws.create_artifact("not-a-type", "x", dict(FULL), _prov(100))
        assert err.value.code == "unknown-type"


# --- blobs & captures ---------------------------------------------------------------


def test_attach_blob_is_content_addressed_and_idempotent(repo):
    with Workspace(repo) as ws:
        digest = ws.attach_blob(b"", at=100)
        assert digest == EMPTY_SHA256
        assert repo.blob_path(digest).read_bytes() == b""
        again = ws.attach_blob(b"", at=200)
        assert again == digest
    events = list(iter_events(repo))
    assert len(events) == 1  # re-attaching the same content is a no-op
    assert events[0].body == {"sha256": EMPTY_SHA256, "size": 0}


def test_ingest_json_capture(repo, tmp_path):
    capture_path = tmp_path / "session.json"
    capture_path.write_text(
        '{"config": {"budget": 5}, "messages": [{"text": "use fewer features"}]}'
    )
    capture = CaptureFile(
        path=capture_path,
        format="json",
        demarcations=(
            Demarcation(
                selector="messages/0",
                type_id="wrangling-recommendations",
                title="Advice",
                generator=Origin.MACHINE,
            ),
            Demarcation(
                selector="config",
                type_id="analysis-goals",
                title="Budget",
                generator=Origin.HUMAN,
                actor_label="analyst",
            ),
        ),
    )
    with Workspace(repo) as ws:
        records = ws.ingest_capture(capture, at=1_000)

    blob_hash = canonical.sha256_hex(capture_path.read_bytes())
    assert [r.payload_ref for r in records] == [f"{blob_hash}#messages/0", f"{blob_hash}#config"]
    assert repo.blob_path(blob_hash).is_file()
    # typed default applies when the demarcation has no classification
    assert records[0].classification  # wrangling-recommendations ships a default
    assert records[1].classification == {}  # analysis-goals has none: classify later
    assert all(r.provenance.capture_method == "api-dump" for r in records)
    kinds = [e.kind for e in iter_events(repo)]
    assert kinds == ["BlobAttached", "ArtifactCreated", "ArtifactCreated"]


def test_ingest_bad_selector_appends_nothing(repo, tmp_path):
    capture_path = tmp_path / "session.json"
    capture_path.write_text('{"messages": []}')
    capture = CaptureFile(
        path=capture_path,
        format="json",
        demarcations=(
            Demarcation("messages/3", "analysis-goals", "missing", Origin.HUMAN),
        ),
    )
    with Workspace(repo) as ws:
        with pytest.raises(StoreError) as err:
            ws.ingest_capture(capture, at=1_000)
        assert err.value.code == "selector-unresolved"
    assert repo.events_path.read_bytes() == b""
    assert not any(repo.blobs_dir.iterdir())


@pytest.mark.parametrize(
    "selector,obj",
    [
        ("", {"a": 1}),
        ("/", [1, 2]),
        ("a/1", {"a": [10, 20]}),
        ("a/b", {"a": {"b": None}}),
    ],
)
def test_json_selector_resolution(selector, obj):
    resolve_json_selector(obj, selector)  # must not raise


def _png_bytes(width, height):
    img = Image.new("RGB", (width, height), (12, 34, 56))
    out = io.BytesIO()
    img.save(out, format="PNG")
    return out.getvalue()


def test_ingest_screenshot_with_region(repo, tmp_path):
    shot = tmp_path / "dash.png"
    shot.write_bytes(_png_bytes(40, 30))
    capture = CaptureFile(
        path=shot,
        format="image",
        demarcations=(
            Demarcation("2,3,10,10", "interactive-dashboard", "Panel", Origin.MACHINE),
        ),
    )
    with Workspace(repo) as ws:
        (record,) = ws.ingest_capture(capture, at=1_000)
    assert record.payload_ref.endswith("#2,3,10,10")
    assert record.provenance.capture_method == "screenshot"


@pytest.mark.parametrize("selector", ["35,25,10,10", "-1,0,5,5", "0,0,0,5", "1,2,3", "a,b,c,d"])
def test_bad_image_regions_rejected(repo, tmp_path, selector):
    shot = tmp_path / "dash.png"
    shot.write_bytes(_png_bytes(40, 30))
    capture = CaptureFile(
        path=shot,
        format="image",
        demarcations=(Demarcation(selector, "interactive-dashboard", "Panel", Origin.MACHINE),),
    )
    with Workspace(repo) as ws:
        with pytest.raises(StoreError) as err:
            ws.ingest_capture(capture, at=1_000)
        assert err.value.code == "selector-unresolved"


def test_non_image_bytes_rejected(repo, tmp_path):
    shot = tmp_path / "dash.png"
    shot.write_bytes(b"definitely not a png")
    capture = CaptureFile(
        path=shot,
        format="image",
        demarcations=(Demarcation("0,0,1,1", "interactive-dashboard", "Panel", Origin.MACHINE),),
    )
    with Workspace(repo) as ws:
        with pytest.raises(StoreError) as err:
            ws.ingest_capture(capture, at=1_000)
        assert err.value.code == "selector-unresolved"


def test_capture_format_checked():
    with pytest.raises(StoreError) as err:
        CaptureFile(path=Repository(".").root, format="csv", demarcations=())
    assert err.value.code == "bad-capture"


# --- snapshots through the store ----------------------------------------------------


def test_snapshot_statuses_computed_from_fingerprints(repo):
    with Workspace(repo) as ws:
        ws.create_artifact("initial-dataset", "a", dict(FULL), _prov(100), artifact_id="a")
        first = ws.snapshot("r1", created_at=200)
        assert first.index == 1
        ws.classify_artifact("a", {**FULL, "d1": frozenset({("cat1.1", "c1.1.2")})}, at=300)
        ws.snapshot("r2", created_at=400)
        ws.snapshot("r3", created_at=500)  # nothing changed
        history = ws.state.graph.history("a")
    assert [v.status.value for v in history] == ["new", "modified", "unchanged"]
    assert history[1].content_hash != history[0].content_hash
    assert history[2].content_hash == history[1].content_hash
