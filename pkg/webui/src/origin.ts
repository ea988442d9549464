import { ORIGIN_COLORS, type Phase, type ViewBundle } from "./types.js";
import { highlightedArtifacts, visibleArtifacts, type ViewState } from "./state.js";
import { htmlEl, svgEl, withTitle } from "./svg.js";

export const PHASE_ORDER: Phase[] = [
  "preparation",
  "interactive",
  "analysis",
  "deployment",
  "communication",
];

const LANE_X = 70;
const FIRST_COLUMN_X = 230;
const COLUMN_GAP = 150;

/**
 * Origin view: artifacts as circles colour-coded human/machine, stacked in
 * phase columns, with flow ribbons from each origin lane weighted by the
 * bundle's (phase, origin) counts. Hover state lights up every artifact
 * sharing the hovered characteristic.
 */
export function renderOrigin(bundle: ViewBundle, state: ViewState): HTMLElement {
  const scene = htmlEl("section", "scene origin-scene");
  const visible = visibleArtifacts(bundle, state);
  const highlighted = highlightedArtifacts(bundle, state);

  const phases = PHASE_ORDER.filter((p) => bundle.origin_view.nodes.some((n) => n.phase === p));
  const columnX = new Map(phases.map((p, i) => [p, FIRST_COLUMN_X + i * COLUMN_GAP]));
  const origins = ["human", "machine", "unknown"].filter(
    (o) => bundle.origin_view.ribbons.some((r) => r.origin === o) ||
      bundle.origin_view.nodes.some((n) => n.origin === o),
  );
  const laneY = new Map(origins.map((o, i) => [o, 90 + i * 110]));

  const stacks = new Map<Phase, number>();
  const maxStack = phases.reduce(
    (acc, p) => Math.max(acc, bundle.origin_view.nodes.filter((n) => n.phase === p).length),
    0,
  );
  const height = Math.max(320, 80 + maxStack * 48);
  const svg = svgEl("svg", {
    viewBox: `0 0 ${FIRST_COLUMN_X + phases.length * COLUMN_GAP} ${height}`,
    class: "origin-svg",
    role: "img",
  });

  for (const [origin, y] of laneY) {
    svg.appendChild(
      svgEl("text", { x: LANE_X, y: y - 24, class: "lane-label", "text-anchor": "middle" }),
    ).textContent = origin;
    svg.appendChild(svgEl("circle", {
      cx: LANE_X,
      cy: y,
      r: 7,
      class: "lane-dot",
      fill: ORIGIN_COLORS[origin] ?? ORIGIN_COLORS.unknown!,
    }));
  }
  for (const phase of phases) {
    const x = columnX.get(phase)!;
    svg.appendChild(
      svgEl("text", { x, y: 28, class: "phase-label", "text-anchor": "middle" }),
    ).textContent = phase;
  }

  // flow ribbons, one per (phase, origin) pair, width scaled by count
  for (const ribbon of bundle.origin_view.ribbons) {
    const x = columnX.get(ribbon.phase);
    const y = laneY.get(ribbon.origin);
    if (x === undefined || y === undefined) continue;
    const landing = 44 + origins.indexOf(ribbon.origin) * 8;
    const mid = (LANE_X + x) / 2;
    const path = svgEl("path", {
      d: `M ${LANE_X + 8} ${y} C ${mid} ${y}, ${mid} ${landing}, ${x} ${landing}`,
      class: "ribbon",
      fill: "none",
      stroke: ORIGIN_COLORS[ribbon.origin] ?? ORIGIN_COLORS.unknown!,
      "stroke-width": 3 + 4 * ribbon.count,
      "stroke-opacity": 0.45,
      "data-phase": ribbon.phase,
      "data-origin": ribbon.origin,
      "data-count": ribbon.count,
    });
    withTitle(path, `${ribbon.count} ${ribbon.origin} artifact(s) in ${ribbon.phase}`);
    svg.appendChild(path);
  }

  for (const node of bundle.origin_view.nodes) {
    const row = stacks.get(node.phase) ?? 0;
    stacks.set(node.phase, row + 1);
    const x = columnX.get(node.phase)!;
    const y = 72 + row * 48;
    const classes = ["node"];
    if (!visible.has(node.id)) classes.push("dimmed");
    if (highlighted.has(node.id)) classes.push("highlighted");
    if (state.selection === node.id) classes.push("selected");
    const circle = svgEl("circle", {
      cx: x,
      cy: y,
      r: 13,
      class: classes.join(" "),
      fill: ORIGIN_COLORS[node.origin] ?? ORIGIN_COLORS.unknown!,
      "data-artifact-id": node.id,
    });
    withTitle(circle, node.title);
    svg.appendChild(circle);
  }

  scene.appendChild(svg);
  scene.appendChild(characteristicList(bundle, state, visible));
  return scene;
}

// Side list of every characteristic carried by a visible artifact; each row
// is a hover target that lights up the artifacts sharing it.
function characteristicList(
  bundle: ViewBundle,
  state: ViewState,
  visible: Set<string>,
): HTMLElement {
  const aside = htmlEl("aside", "char-list");
  aside.appendChild(htmlEl("h3", "", "Characteristics in view"));
  const seen = new Set<string>();
  for (const id of visible) {
    const node = bundle.nodes[id];
    if (!node) continue;
    for (const pairs of Object.values(node.classification)) {
      for (const [, charId] of pairs) seen.add(charId);
    }
  }
  const list = htmlEl("ul");
  for (const charId of [...seen].sort()) {
    const label = bundle.taxonomy_labels[charId] ?? charId;
    const item = htmlEl("li", "char-entry", label);
    item.dataset.characteristicId = charId;
    if (state.hover?.kind === "characteristic" && state.hover.id === charId) {
      item.classList.add("active");
    }
    list.appendChild(item);
  }
  aside.appendChild(list);
  return aside;
}
