import { ORIGIN_COLORS, type HistoryCell, type ViewBundle } from "./types.js";
import { highlightedArtifacts, visibleArtifacts, type ViewState } from "./state.js";
import { htmlEl, svgEl, withTitle } from "./svg.js";

const LABEL_WIDTH = 230;
const COLUMN_STEP = 120;
const FIRST_ROW_Y = 84;
const ROW_STEP = 72;
const GLYPH_R = 9;

/**
 * History view: one horizontal line per revision. New and modified versions
 * are circles, untouched carry-overs are downward triangles. A selection made
 * in any view gets a vertical guide plus its declared dependencies sketched
 * under the last row.
 */
export function renderHistory(bundle: ViewBundle, state: ViewState): HTMLElement {
  const scene = htmlEl("section", "scene history-scene");
  const rows = bundle.history_view.rows;
  const columns = columnOrder(bundle);
  const xOf = new Map(columns.map((id, i) => [id, LABEL_WIDTH + 40 + i * COLUMN_STEP]));
  const visible = visibleArtifacts(bundle, state);
  const highlighted = highlightedArtifacts(bundle, state);

  const width = LABEL_WIDTH + 80 + columns.length * COLUMN_STEP;
  const height = FIRST_ROW_Y + rows.length * ROW_STEP + 60;
  const svg = svgEl("svg", { viewBox: `0 0 ${width} ${height}`, class: "history-svg", role: "img" });

  for (const [id, x] of xOf) {
    const header = svgEl("text", { x, y: 34, class: "column-label", "text-anchor": "middle" });
    header.textContent = shorten(bundle.nodes[id]?.title ?? id);
    svg.appendChild(header);
  }

  rows.forEach((row, i) => {
    const y = FIRST_ROW_Y + i * ROW_STEP;
    svg.appendChild(svgEl("line", {
      x1: LABEL_WIDTH + 10,
      y1: y,
      x2: width - 30,
      y2: y,
      class: "revision-line",
      "data-revision": row.index,
    }));
    const label = svgEl("text", { x: 16, y: y + 4, class: "revision-label" });
    label.textContent = `${row.index}. ${row.label}`;
    svg.appendChild(label);
    const when = svgEl("text", { x: 16, y: y + 22, class: "revision-date" });
    when.textContent = new Date(row.created_at).toISOString().slice(0, 10);
    svg.appendChild(when);

    for (const cell of row.cells) {
      const x = xOf.get(cell.artifact_id);
      if (x === undefined) continue;
      svg.appendChild(glyphFor(bundle, state, cell, row.index, x, y, visible, highlighted));
    }
  });

  if (state.selection !== null && xOf.has(state.selection)) {
    const x = xOf.get(state.selection)!;
    const lastY = FIRST_ROW_Y + (rows.length - 1) * ROW_STEP;
    svg.appendChild(svgEl("line", {
      x1: x, y1: FIRST_ROW_Y - 30, x2: x, y2: lastY + 30, class: "selection-guide",
    }));
    // sketch the selection's declared dependencies beneath the final row
    for (const arc of bundle.dependency_view.arcs) {
      if (arc.from !== state.selection && arc.to !== state.selection) continue;
      const other = arc.from === state.selection ? arc.to : arc.from;
      const otherX = xOf.get(other);
      if (otherX === undefined) continue;
      const baseY = lastY + 36;
      const mid = (x + otherX) / 2;
      svg.appendChild(svgEl("path", {
        d: `M ${x} ${baseY} Q ${mid} ${baseY + 34} ${otherX} ${baseY}`,
        class: "dependency-link",
        fill: "none",
        "data-from": arc.from,
        "data-to": arc.to,
      }));
    }
  }

  scene.appendChild(svg);
  return scene;
}

function glyphFor(
  bundle: ViewBundle,
  state: ViewState,
  cell: HistoryCell,
  revision: number,
  x: number,
  y: number,
  visible: Set<string>,
  highlighted: Set<string>,
): SVGElement {
  const classes = ["glyph", cell.glyph];
  if (!visible.has(cell.artifact_id)) classes.push("dimmed");
  if (highlighted.has(cell.artifact_id)) classes.push("highlighted");
  if (state.selection === cell.artifact_id) classes.push("selected");
  const attrs: Record<string, string | number> = {
    class: classes.join(" "),
    fill: ORIGIN_COLORS[cell.origin] ?? ORIGIN_COLORS.unknown!,
    "data-artifact-id": cell.artifact_id,
    "data-status": cell.status,
    "data-glyph": cell.glyph,
    "data-revision": revision,
  };
  const glyph =
    cell.glyph === "triangle"
      ? svgEl("polygon", {
          ...attrs,
          points: `${x - GLYPH_R},${y - GLYPH_R + 2} ${x + GLYPH_R},${y - GLYPH_R + 2} ${x},${y + GLYPH_R}`,
        })
      : svgEl("circle", { ...attrs, cx: x, cy: y, r: GLYPH_R });
  const title = bundle.nodes[cell.artifact_id]?.title ?? cell.artifact_id;
  return withTitle(
    glyph,
    `${title} — rev ${revision}: ${cell.status}, ${cell.origin}, ${cell.content_hash.slice(0, 12)}`,
  );
}

function columnOrder(bundle: ViewBundle): string[] {
  const ids = new Set<string>();
  for (const row of bundle.history_view.rows) {
    for (const cell of row.cells) ids.add(cell.artifact_id);
  }
  return [...ids].sort((a, b) => (bundle.nodes[a]?.seq ?? 0) - (bundle.nodes[b]?.seq ?? 0));
}

function shorten(title: string): string {
  return title.length <= 16 ? title : `${title.slice(0, 15)}…`;
}
