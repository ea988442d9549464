// Shapes of the exported view bundle. The explorer only ever reads these;
// nothing in the UI writes back.

export const SUPPORTED_SCHEMA = "tracelift-view/1";

export type OriginKind = "human" | "machine";
export type Phase =
  | "preparation"
  | "interactive"
  | "analysis"
  | "deployment"
  | "communication";

// classification: dimension id -> list of [category id, characteristic id]
export type ClassificationPairs = Record<string, [string, string][]>;

export interface ArtifactNode {
  classification: ClassificationPairs;
  group: string;
  origin: OriginKind | "unknown";
  phase: Phase;
  seq: number;
  title: string;
  type_id: string;
}

export interface OriginViewNode {
  id: string;
  origin: OriginKind | "unknown";
  phase: Phase;
  title: string;
}

export interface Ribbon {
  count: number;
  origin: OriginKind | "unknown";
  phase: Phase;
}

export interface Arc {
  declared_by: "human" | "machine" | "inferred";
  from: string;
  to: string;
}

export interface ClosurePair {
  upstream: string[];
  downstream: string[];
}

export interface HistoryCell {
  artifact_id: string;
  content_hash: string;
  glyph: "circle" | "triangle";
  origin: OriginKind | "unknown";
  status: "new" | "modified" | "unchanged";
}

export interface HistoryRow {
  cells: HistoryCell[];
  created_at: number; // unix epoch milliseconds
  index: number;
  label: string;
}

export interface ViewBundle {
  schema_version: string;
  nodes: Record<string, ArtifactNode>;
  origin_view: { nodes: OriginViewNode[]; ribbons: Ribbon[] };
  dependency_view: {
    order: string[];
    arcs: Arc[];
    closures: Record<string, ClosurePair>;
  };
  history_view: { rows: HistoryRow[] };
  characteristic_index: Record<string, string[]>;
  taxonomy_labels: Record<string, string>;
}

export interface LoadError {
  kind: "schema-mismatch" | "invalid-bundle" | "fetch-failed";
  message: string;
}

export type ParseResult = { ok: true; bundle: ViewBundle } | { ok: false; error: LoadError };

const REQUIRED_SECTIONS = [
  "nodes",
  "origin_view",
  "dependency_view",
  "history_view",
  "characteristic_index",
  "taxonomy_labels",
] as const;

/**
 * Gate an untrusted JSON document before treating it as a ViewBundle.
 * Only the schema version and section layout are checked here; the
 * exporter is responsible for internal consistency.
 */
export function parseBundle(raw: unknown): ParseResult {
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
    return fail("invalid-bundle", "bundle must be a JSON object");
  }
  const doc = raw as Record<string, unknown>;
  if (doc.schema_version !== SUPPORTED_SCHEMA) {
    return fail(
      "schema-mismatch",
      `unsupported schema ${JSON.stringify(doc.schema_version)}; this explorer reads ${SUPPORTED_SCHEMA}`,
    );
  }
  for (const section of REQUIRED_SECTIONS) {
    if (typeof doc[section] !== "object" || doc[section] === null) {
      return fail("invalid-bundle", `bundle is missing its "${section}" section`);
    }
  }
  return { ok: true, bundle: raw as ViewBundle };
}

function fail(kind: LoadError["kind"], message: string): ParseResult {
  return { ok: false, error: { kind, message } };
}

// Okabe-Ito hues: colorblind-safe blue for human work, orange for machine.
export const ORIGIN_COLORS: Record<string, string> = {
  human: "#0072b2",
  machine: "#e69f00",
  unknown: "#8a8a8a",
};
