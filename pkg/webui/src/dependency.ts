import { ORIGIN_COLORS, type ViewBundle } from "./types.js";
import {
  highlightedArtifacts,
  selectionClosure,
  visibleArtifacts,
  type ViewState,
} from "./state.js";
import { htmlEl, svgEl, withTitle } from "./svg.js";

const AXIS_Y = 230;
const FIRST_X = 80;
const STEP_X = 130;

const ARC_COLORS: Record<string, string> = {
  human: ORIGIN_COLORS.human!,
  machine: ORIGIN_COLORS.machine!,
  inferred: "#666666",
};

/**
 * Dependency view: artifacts on a horizontal axis in bundle order with arcs
 * drawn above it. Selecting a node emphasises its whole upstream/downstream
 * neighbourhood using the closures shipped in the bundle — nothing is
 * recomputed here.
 */
export function renderDependency(bundle: ViewBundle, state: ViewState): HTMLElement {
  const scene = htmlEl("section", "scene dependency-scene");
  const order = bundle.dependency_view.order;
  const xOf = new Map(order.map((id, i) => [id, FIRST_X + i * STEP_X]));
  const visible = visibleArtifacts(bundle, state);
  const highlighted = highlightedArtifacts(bundle, state);
  const closure = selectionClosure(bundle, state);

  const width = FIRST_X + Math.max(order.length, 1) * STEP_X;
  const svg = svgEl("svg", {
    viewBox: `0 0 ${width} ${AXIS_Y + 90}`,
    class: "dependency-svg",
    role: "img",
  });
  svg.appendChild(svgEl("line", {
    x1: 20, y1: AXIS_Y, x2: width - 20, y2: AXIS_Y, class: "axis",
  }));

  for (const arc of bundle.dependency_view.arcs) {
    const fromX = xOf.get(arc.from);
    const toX = xOf.get(arc.to);
    if (fromX === undefined || toX === undefined) continue;
    const [left, right] = fromX < toX ? [fromX, toX] : [toX, fromX];
    const radius = (right - left) / 2;
    const attrs: Record<string, string | number> = {
      // sweep flag 1 from the left endpoint keeps every arc above the axis
      d: `M ${left} ${AXIS_Y} A ${radius} ${radius} 0 0 1 ${right} ${AXIS_Y}`,
      class: emphasised(arc.from, arc.to, state, closure) ? "arc emphasised" : "arc",
      fill: "none",
      stroke: ARC_COLORS[arc.declared_by] ?? ARC_COLORS.inferred!,
      "stroke-width": 2,
      "data-from": arc.from,
      "data-to": arc.to,
      "data-declared-by": arc.declared_by,
    };
    if (arc.declared_by === "inferred") attrs["stroke-dasharray"] = "5 3";
    svg.appendChild(svgEl("path", attrs));
  }

  for (const id of order) {
    const node = bundle.nodes[id];
    if (!node) continue;
    const x = xOf.get(id)!;
    const classes = ["node"];
    if (!visible.has(id)) classes.push("dimmed");
    if (highlighted.has(id)) classes.push("highlighted");
    if (state.selection === id) classes.push("selected");
    else if (closure.has(id)) classes.push("in-closure");
    const circle = svgEl("circle", {
      cx: x,
      cy: AXIS_Y,
      r: 12,
      class: classes.join(" "),
      fill: ORIGIN_COLORS[node.origin] ?? ORIGIN_COLORS.unknown!,
      "data-artifact-id": id,
    });
    withTitle(circle, node.title);
    svg.appendChild(circle);
    const caption = svgEl("text", {
      x,
      y: AXIS_Y + 34,
      class: "node-caption",
      "text-anchor": "middle",
    });
    caption.textContent = shorten(node.title);
    svg.appendChild(caption);
  }

  scene.appendChild(svg);
  return scene;
}

function emphasised(from: string, to: string, state: ViewState, closure: Set<string>): boolean {
  if (state.selection === null) return false;
  return closure.has(from) && closure.has(to);
}

function shorten(title: string): string {
  return title.length <= 18 ? title : `${title.slice(0, 17)}…`;
}
