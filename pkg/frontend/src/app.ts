/** Browser bootstrap: wires the panes, buttons and service client. */

import { ApiClient } from "./api.js";
import { renderNarrativeHtml } from "./document.js";
import { renderLayersHtml } from "./layers.js";
import { ScenarioToggle } from "./scenario.js";
import {
  applyCaseResponse,
  clearOverlay,
  initialState,
  overlayMembers,
  setOverlay,
  switchLeft,
  switchRight,
  type LeftPane,
  type RightPane,
  type ViewState,
} from "./state.js";
import { renderTableHtml } from "./table.js";
import { buildTree, renderTreeHtml } from "./tree.js";

export class Workbench {
  state: ViewState = initialState();
  readonly toggles: ScenarioToggle;

  constructor(
    private readonly client: ApiClient,
    private readonly left: HTMLElement,
    private readonly right: HTMLElement,
    private readonly status: HTMLElement,
  ) {
    this.toggles = new ScenarioToggle(client);
  }

  async load(): Promise<void> {
    this.state = applyCaseResponse(this.state, await this.client.getCase());
    this.render();
  }

  render(): void {
    const doc = this.state.document;
    if (!doc) {
      this.right.innerHTML = '<p class="empty-state">No case loaded.</p>';
      return;
    }
    const overlay = overlayMembers(this.state);
    this.right.innerHTML =
      this.state.activeRight === "tree"
        ? renderTreeHtml(buildTree(doc, overlay))
        : renderLayersHtml(doc, overlay);
    this.left.innerHTML =
      this.state.activeLeft === "table"
        ? renderTableHtml(doc, overlay)
        : this.state.activeLeft === "document"
          ? renderNarrativeHtml(doc)
          : this.selectorEditorHtml();
    this.status.textContent = `version ${this.state.version}`;
  }

  private selectorEditorHtml(): string {
    return (
      '<div class="selector-editor"><input id="selector-input" placeholder="kind:Goal & statement~&quot;jailbreak&quot;">' +
      '<button id="selector-run">Run</button><div id="selector-result"></div></div>'
    );
  }

  async runNamedQuery(id: string, params: Record<string, string> = {}): Promise<void> {
    const rows = await this.client.runQuery(id, params);
    this.state = setOverlay(this.state, id, rows.data.map((r) => r.id));
    this.render();
  }

  async runSelector(dsl: string): Promise<void> {
    const rows = await this.client.runSelector(dsl);
    this.state = setOverlay(this.state, "selector", rows.data.map((r) => r.id));
    this.render();
  }

  dropOverlay(name: string): void {
    this.state = clearOverlay(this.state, name);
    this.render();
  }

  async toggleScenario(id: string): Promise<void> {
    try {
      this.state = this.toggles.isActive(id, this.state)
        ? await this.toggles.toggleOff(this.state, id)
        : await this.toggles.toggleOn(this.state, id);
    } catch (error) {
      this.status.textContent = String(error);
      return;
    }
    this.render();
  }

  setLeft(pane: LeftPane): void {
    this.state = switchLeft(this.state, pane);
    this.render();
  }

  setRight(pane: RightPane): void {
    this.state = switchRight(this.state, pane);
    this.render();
  }
}

export function mount(root: Document = document): Workbench {
  const client = new ApiClient("");
  const bench = new Workbench(
    client,
    root.getElementById("left-pane")!,
    root.getElementById("right-pane")!,
    root.getElementById("status")!,
  );
  for (const pane of ["table", "selector", "document"] as const) {
    root.getElementById(`btn-${pane}`)?.addEventListener("click", () => bench.setLeft(pane));
  }
  for (const pane of ["tree", "layers"] as const) {
    root.getElementById(`btn-${pane}`)?.addEventListener("click", () => bench.setRight(pane));
  }
  root.getElementById("btn-ae01")?.addEventListener("click", () => void bench.runNamedQuery("AE-01"));
  root.getElementById("btn-toggle-jailbreak")?.addEventListener(
    "click",
    () => void bench.toggleScenario("D-jailbreak"),
  );
  void bench.load();
  return bench;
}
