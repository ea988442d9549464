import type { OriginKind, ViewBundle } from "./types.js";

export type ActiveView = "origin" | "dependency" | "history";

export type HoverTarget =
  | { kind: "artifact"; id: string }
  | { kind: "characteristic"; id: string }
  | null;

export interface ViewState {
  view: ActiveView;
  selection: string | null; // artifact id, shared by all three views
  hover: HoverTarget;
  originFilter: OriginKind | null; // null = show everything
}

export function initialState(): ViewState {
  return { view: "origin", selection: null, hover: null, originFilter: null };
}

export function setView(state: ViewState, view: ActiveView): ViewState {
  return { ...state, view };
}

/** Toggle selection; ids that don't resolve in the bundle are ignored. */
export function selectArtifact(bundle: ViewBundle, state: ViewState, id: string | null): ViewState {
  if (id === null) return { ...state, selection: null };
  if (!(id in bundle.nodes)) return state;
  return { ...state, selection: state.selection === id ? null : id };
}

export function hoverArtifact(bundle: ViewBundle, state: ViewState, id: string): ViewState {
  if (!(id in bundle.nodes)) return state;
  return { ...state, hover: { kind: "artifact", id } };
}

export function hoverCharacteristic(bundle: ViewBundle, state: ViewState, id: string): ViewState {
  if (!(id in bundle.characteristic_index) && !(id in bundle.taxonomy_labels)) return state;
  return { ...state, hover: { kind: "characteristic", id } };
}

export function clearHover(state: ViewState): ViewState {
  return state.hover === null ? state : { ...state, hover: null };
}

export function setOriginFilter(state: ViewState, origin: OriginKind | null): ViewState {
  return { ...state, originFilter: origin };
}

/**
 * Artifacts to emphasise for the current hover target. Hovering a
 * characteristic lights up every artifact sharing it, straight from the
 * bundle's precomputed index.
 */
export function highlightedArtifacts(bundle: ViewBundle, state: ViewState): Set<string> {
  if (state.hover === null) return new Set();
  if (state.hover.kind === "artifact") return new Set([state.hover.id]);
  return new Set(bundle.characteristic_index[state.hover.id] ?? []);
}

/** Artifacts that pass the origin filter (all of them when no filter is set). */
export function visibleArtifacts(bundle: ViewBundle, state: ViewState): Set<string> {
  const ids = Object.keys(bundle.nodes);
  if (state.originFilter === null) return new Set(ids);
  return new Set(ids.filter((id) => bundle.nodes[id]?.origin === state.originFilter));
}

/**
 * The selection plus its transitive neighbourhood in the dependency view.
 * Closures come from the bundle; the UI never walks edges itself.
 */
export function selectionClosure(bundle: ViewBundle, state: ViewState): Set<string> {
  if (state.selection === null) return new Set();
  const pair = bundle.dependency_view.closures[state.selection];
  if (pair === undefined) return new Set([state.selection]);
  return new Set([state.selection, ...pair.upstream, ...pair.downstream]);
}
