#!/usr/bin/env python3
"""Build the deterministic demo repository and export its view bundle.

Examples:
    python scripts/build_demo_repo.py /tmp/demo-repo
    python scripts/build_demo_repo.py --golden    # refresh tests/golden/
"""

import argparse
import hashlib
import json
import sys
import tempfile
from pathlib import Path

from tracelift.query_export import Filter, RepoView
from tracelift.sampledata import build_scenario_repo

REPO_ROOT = Path(__file__).resolve().parent.parent
GOLDEN_DIR = REPO_ROOT / "tests" / "golden"
HIGHLIGHT_CHAR = "c2.1.2"


def build_and_export(path: Path, bundle_out: Path) -> None:
    scenario = build_scenario_repo(path)
    view = RepoView.open(scenario.repo)
    exported = view.export_view_bundle(scenario.repo, bundle_out)
    digest = hashlib.sha256(exported.read_bytes()).hexdigest()
    print(f"repository: {scenario.repo.root}")
    print(f"artifacts:  {len(scenario.ids)}")
    print(f"revisions:  {scenario.revision_count}")
    print(f"bundle:     {exported} (sha256 {digest})")


def refresh_golden() -> None:
    GOLDEN_DIR.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as scratch:
        scenario = build_scenario_repo(Path(scratch) / "demo")
        view = RepoView.open(scenario.repo)
        bundle_path = view.export_view_bundle(scenario.repo, GOLDEN_DIR / "view-bundle.json")
        located = [s.artifact_id for s in view.locate(Filter(characteristic=HIGHLIGHT_CHAR))]
    highlight_path = GOLDEN_DIR / f"highlight-{HIGHLIGHT_CHAR}.json"
    highlight_path.write_text(
        json.dumps({"artifact_ids": located, "characteristic": HIGHLIGHT_CHAR}, indent=2) + "\n"
    )
    print(f"wrote {bundle_path}")
    print(f"wrote {highlight_path}")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("path", nargs="?", type=Path, help="where to create the demo repository")
    parser.add_argument("--golden", action="store_true", help="refresh the committed test fixtures")
    args = parser.parse_args(argv)

    if args.golden:
        refresh_golden()
        return 0
    if args.path is None:
        parser.error("a target path is required unless --golden is given")
    if args.path.exists():
        parser.error(f"{args.path} already exists; pick a fresh directory")
    build_and_export(args.path, args.path / "exports" / "view-bundle.json")
    return 0


if __name__ == "__main__":
    sys.exit(main())
