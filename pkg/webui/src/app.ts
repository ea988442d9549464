import { parseBundle, type LoadError, type OriginKind, type ParseResult, type ViewBundle } from "./types.js";
import {
  clearHover,
  hoverArtifact,
  hoverCharacteristic,
  initialState,
  selectArtifact,
  setOriginFilter,
  setView,
  type ActiveView,
  type ViewState,
} from "./state.js";
import { renderOrigin } from "./origin.js";
import { renderDependency } from "./dependency.js";
import { renderHistory } from "./history.js";
import { renderInfoCard } from "./infocard.js";
import { htmlEl } from "./svg.js";

type Status = "empty" | "loading" | "ready" | "error";

const TABS: [ActiveView, string][] = [
  ["origin", "Origin"],
  ["dependency", "Dependency"],
  ["history", "History"],
];

/**
 * The explorer shell: owns the loaded bundle plus one ViewState shared by
 * all three views, and re-renders the active scene on every interaction.
 * The bundle itself is treated as read-only throughout.
 */
export class App {
  readonly root: HTMLElement;
  private bundle: ViewBundle | null = null;
  private state: ViewState = initialState();
  private status: Status = "empty";
  private error: LoadError | null = null;

  constructor(root: HTMLElement) {
    this.root = root;
    this.root.addEventListener("click", (ev) => this.onClick(ev));
    this.root.addEventListener("mouseover", (ev) => this.onMouseOver(ev));
    this.root.addEventListener("mouseout", () => this.update(clearHover(this.state)));
    this.root.addEventListener("change", (ev) => this.onChange(ev));
    this.render();
  }

  /** Fetch the first bundle that resolves; falls back through the url list. */
  async load(...urls: string[]): Promise<void> {
    this.status = "loading";
    this.render();
    for (const url of urls) {
      let payload: unknown;
      try {
        const response = await fetch(url);
        if (!response.ok) continue;
        payload = await response.json();
      } catch {
        continue;
      }
      this.applyParsed(parseBundle(payload));
      return;
    }
    this.fail({ kind: "fetch-failed", message: `could not load a bundle from ${urls.join(" or ")}` });
  }

  /** Load an already-parsed JSON document (file open, tests). */
  loadFromObject(raw: unknown): void {
    this.applyParsed(parseBundle(raw));
  }

  currentState(): ViewState {
    return { ...this.state };
  }

  currentBundle(): ViewBundle | null {
    return this.bundle;
  }

  private applyParsed(result: ParseResult): void {
    if (result.ok) {
      this.bundle = result.bundle;
      this.state = initialState();
      this.status = "ready";
      this.error = null;
      this.render();
    } else {
      this.fail(result.error);
    }
  }

  private fail(error: LoadError): void {
    this.bundle = null;
    this.status = "error";
    this.error = error;
    this.render();
  }

  private update(next: ViewState): void {
    if (next !== this.state) {
      this.state = next;
      this.render();
    }
  }

  private onClick(ev: Event): void {
    const target = ev.target as Element | null;
    if (target === null || this.bundle === null) return;
    const tab = target.closest<HTMLElement>("[data-view-tab]");
    if (tab?.dataset.viewTab) {
      this.update(setView(this.state, tab.dataset.viewTab as ActiveView));
      return;
    }
    const node = target.closest<Element>("[data-artifact-id]");
    const id = node?.getAttribute("data-artifact-id");
    if (id) this.update(selectArtifact(this.bundle, this.state, id));
  }

  private onMouseOver(ev: Event): void {
    const target = ev.target as Element | null;
    if (target === null || this.bundle === null) return;
    const charEntry = target.closest<Element>("[data-characteristic-id]");
    const charId = charEntry?.getAttribute("data-characteristic-id");
    if (charId) {
      this.update(hoverCharacteristic(this.bundle, this.state, charId));
      return;
    }
    const node = target.closest<Element>("[data-artifact-id]");
    const id = node?.getAttribute("data-artifact-id");
    if (id) this.update(hoverArtifact(this.bundle, this.state, id));
  }

  private onChange(ev: Event): void {
    const target = ev.target as HTMLSelectElement | null;
    if (!target?.matches("select[data-origin-filter]")) return;
    const origin = target.value === "" ? null : (target.value as OriginKind);
    this.update(setOriginFilter(this.state, origin));
  }

  render(): void {
    this.root.replaceChildren();
    this.root.appendChild(this.toolbar());

    if (this.status === "loading") {
      this.root.appendChild(htmlEl("div", "banner loading", "Loading bundle…"));
      return;
    }
    if (this.status === "error" && this.error !== null) {
      this.root.appendChild(htmlEl("div", "banner load-error", this.error.message));
      return;
    }
    if (this.bundle === null) {
      this.root.appendChild(htmlEl("div", "banner empty", "No bundle loaded yet."));
      return;
    }

    const area = htmlEl("div", "view-area");
    switch (this.state.view) {
      case "origin":
        area.appendChild(renderOrigin(this.bundle, this.state));
        break;
      case "dependency":
        area.appendChild(renderDependency(this.bundle, this.state));
        break;
      case "history":
        area.appendChild(renderHistory(this.bundle, this.state));
        break;
    }
    const detail = htmlEl("aside", "detail");
    const card = renderInfoCard(this.bundle, this.state);
    detail.appendChild(card ?? htmlEl("div", "info-card empty", "Hover an artifact for details."));
    area.appendChild(detail);
    this.root.appendChild(area);
  }

  private toolbar(): HTMLElement {
    const bar = htmlEl("nav", "toolbar");
    for (const [view, label] of TABS) {
      const button = htmlEl("button", this.state.view === view ? "tab active" : "tab", label);
      button.dataset.viewTab = view;
      button.type = "button";
      bar.appendChild(button);
    }

    const filter = document.createElement("select");
    filter.className = "origin-filter";
    filter.dataset.originFilter = "";
    const choices: [string, string][] = [["", "All origins"], ["human", "Human"], ["machine", "Machine"]];
    for (const [value, label] of choices) {
      const option = document.createElement("option");
      option.value = value;
      option.textContent = label;
      option.selected = (this.state.originFilter ?? "") === value;
      filter.appendChild(option);
    }
    bar.appendChild(filter);

    const open = htmlEl("label", "file-open", "Open bundle ");
    const input = document.createElement("input");
    input.type = "file";
    input.accept = "application/json";
    input.addEventListener("change", async () => {
      const file = input.files?.[0];
      if (!file) return;
      try {
        this.loadFromObject(JSON.parse(await file.text()));
      } catch {
        this.fail({ kind: "invalid-bundle", message: `${file.name} is not valid JSON` });
      }
    });
    open.appendChild(input);
    bar.appendChild(open);
    return bar;
  }
}

export function bootstrap(root?: HTMLElement): App {
  const host = root ?? document.getElementById("app");
  if (!host) throw new Error("no #app element to mount into");
  const app = new App(host);
  void app.load("./view-bundle.json", "../exports/view-bundle.json");
  return app;
}
