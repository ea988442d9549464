import { existsSync, readFileSync } from "node:fs";
import { resolve } from "node:path";
import { parseBundle, type ViewBundle } from "../src/types.js";

// The demo bundle exported by the Python side; regenerate with
// scripts/build_demo_repo.py --golden if the exporter changes.
// (import.meta.url is http-schemed under happy-dom, so resolve on disk.)
function goldenPath(name: string): string {
  for (const base of ["../tests/golden", "tests/golden"]) {
    const candidate = resolve(process.cwd(), base, name);
    if (existsSync(candidate)) return candidate;
  }
  throw new Error(`fixture ${name} not found relative to ${process.cwd()}`);
}

export function readFixtureJson(name: string): unknown {
  return JSON.parse(readFileSync(goldenPath(name), "utf8"));
}

export function loadFixtureBundle(): ViewBundle {
  const parsed = parseBundle(readFixtureJson("view-bundle.json"));
  if (!parsed.ok) throw new Error(`golden bundle rejected: ${parsed.error.message}`);
  return parsed.bundle;
}

export interface HighlightFixture {
  artifact_ids: string[];
  characteristic: string;
}

export function loadHighlightFixture(): HighlightFixture {
  return readFixtureJson("highlight-c2.1.2.json") as HighlightFixture;
}

export function findByType(bundle: ViewBundle, typeId: string): string {
  for (const [id, node] of Object.entries(bundle.nodes)) {
    if (node.type_id === typeId) return id;
  }
  throw new Error(`no artifact of type ${typeId} in fixture`);
}

/** Tiny hand-built bundle with one edge (n1 -> n2) and one isolated node. */
export function makeMiniBundle(): ViewBundle {
  const classification = { d9: [["cat9.1", "c9.1.1"]] as [string, string][] };
  const node = (id: string, seq: number, origin: "human" | "machine", title: string) => ({
    classification,
    group: "demo",
    origin,
    phase: "preparation" as const,
    seq,
    title,
    type_id: "initial-dataset",
  });
  return {
    schema_version: "tracelift-view/1",
    nodes: {
      n1: node("n1", 1, "human", "First"),
      n2: node("n2", 2, "machine", "Second"),
      n3: node("n3", 3, "human", "Loner"),
    },
    origin_view: {
      nodes: [
        { id: "n1", origin: "human", phase: "preparation", title: "First" },
        { id: "n2", origin: "machine", phase: "preparation", title: "Second" },
        { id: "n3", origin: "human", phase: "preparation", title: "Loner" },
      ],
      ribbons: [
        { count: 2, origin: "human", phase: "preparation" },
        { count: 1, origin: "machine", phase: "preparation" },
      ],
    },
    dependency_view: {
      order: ["n1", "n2", "n3"],
      arcs: [{ declared_by: "human", from: "n1", to: "n2" }],
      closures: {
        n1: { upstream: [], downstream: ["n2"] },
        n2: { upstream: ["n1"], downstream: [] },
        n3: { upstream: [], downstream: [] },
      },
    },
    history_view: {
      rows: [
        {
          cells: [
            { artifact_id: "n1", content_hash: "a".repeat(64), glyph: "circle", origin: "human", status: "new" },
            { artifact_id: "n2", content_hash: "b".repeat(64), glyph: "circle", origin: "machine", status: "new" },
            { artifact_id: "n3", content_hash: "c".repeat(64), glyph: "circle", origin: "human", status: "new" },
          ],
          created_at: 1700000000000,
          index: 1,
          label: "only",
        },
      ],
    },
    characteristic_index: { "c9.1.1": ["n1", "n2", "n3"] },
    taxonomy_labels: { "cat9.1": "Demo category", "c9.1.1": "Demo trait" },
  };
}
