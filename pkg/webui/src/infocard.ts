import type { ViewBundle } from "./types.js";
import type { ViewState } from "./state.js";
import { htmlEl } from "./svg.js";

/**
 * Detail panel for the current hover target (falling back to the selection).
 * Classification rows inside an artifact card are themselves hover targets:
 * pointing at one highlights all artifacts sharing that characteristic.
 */
export function renderInfoCard(bundle: ViewBundle, state: ViewState): HTMLElement | null {
  const target = state.hover ?? (state.selection ? { kind: "artifact" as const, id: state.selection } : null);
  if (target === null) return null;
  return target.kind === "artifact"
    ? artifactCard(bundle, target.id)
    : characteristicCard(bundle, target.id);
}

function artifactCard(bundle: ViewBundle, id: string): HTMLElement | null {
  const node = bundle.nodes[id];
  if (!node) return null;
  const card = htmlEl("div", "info-card artifact-card");
  card.appendChild(htmlEl("h3", "", node.title));

  const facts = htmlEl("dl", "facts");
  const rows: [string, string][] = [
    ["Type", node.type_id],
    ["Group", node.group],
    ["Phase", node.phase],
    ["Origin", node.origin],
  ];
  for (const [term, value] of rows) {
    facts.appendChild(htmlEl("dt", "", term));
    facts.appendChild(htmlEl("dd", "", value));
  }
  card.appendChild(facts);

  card.appendChild(htmlEl("h4", "", "Classified as"));
  const list = htmlEl("ul", "classification");
  for (const dimension of Object.keys(node.classification).sort()) {
    for (const [catId, charId] of node.classification[dimension] ?? []) {
      const cat = bundle.taxonomy_labels[catId] ?? catId;
      const char = bundle.taxonomy_labels[charId] ?? charId;
      const entry = htmlEl("li", "char-entry", `${cat} · ${char}`);
      entry.dataset.characteristicId = charId;
      list.appendChild(entry);
    }
  }
  card.appendChild(list);
  return card;
}

function characteristicCard(bundle: ViewBundle, charId: string): HTMLElement {
  const card = htmlEl("div", "info-card characteristic-card");
  card.appendChild(htmlEl("h3", "", bundle.taxonomy_labels[charId] ?? charId));
  const sharers = bundle.characteristic_index[charId] ?? [];
  card.appendChild(
    htmlEl("p", "share-count", `${sharers.length} artifact(s) share this characteristic`),
  );
  const list = htmlEl("ul", "sharers");
  for (const id of sharers) {
    list.appendChild(htmlEl("li", "", bundle.nodes[id]?.title ?? id));
  }
  card.appendChild(list);
  return card;
}
