/** View state for one workbench session.
 *
 * Rendered flags always belong to the snapshot version held here; applying
 * an older response than the one on display is refused, so the displayed
 * version never decreases.
 */

import type { CaseDocument, Envelope } from "./types.js";

export type LeftPane = "table" | "selector" | "document";
export type RightPane = "tree" | "layers";

export interface ViewState {
  activeLeft: LeftPane;
  activeRight: RightPane;
  version: number;
  document: CaseDocument | null;
  overlays: Record<string, string[]>;
  selectedId: string | null;
  renderCount: number;
}

export function initialState(): ViewState {
  return {
    activeLeft: "table",
    activeRight: "tree",
    version: 0,
    document: null,
    overlays: {},
    selectedId: null,
    renderCount: 0,
  };
}

export class StaleResponseError extends Error {
  constructor(incoming: number, displayed: number) {
    super(`response for version ${incoming} is older than displayed version ${displayed}`);
  }
}

/** Adopt a /case response; the single path through which flags reach the view. */
export function applyCaseResponse(state: ViewState, response: Envelope<CaseDocument>): ViewState {
  if (response.version < state.version) {
    throw new StaleResponseError(response.version, state.version);
  }
  return {
    ...state,
    version: response.version,
    document: response.data,
    renderCount: state.renderCount + 1,
  };
}

export function setOverlay(state: ViewState, name: string, ids: string[]): ViewState {
  return { ...state, overlays: { ...state.overlays, [name]: [...ids].sort() } };
}

export function clearOverlay(state: ViewState, name: string): ViewState {
  const overlays = { ...state.overlays };
  delete overlays[name];
  return { ...state, overlays };
}

export function overlayMembers(state: ViewState): Set<string> {
  const out = new Set<string>();
  for (const ids of Object.values(state.overlays)) {
    for (const id of ids) out.add(id);
  }
  return out;
}

export function switchLeft(state: ViewState, pane: LeftPane): ViewState {
  return { ...state, activeLeft: pane };
}

export function switchRight(state: ViewState, pane: RightPane): ViewState {
  return { ...state, activeRight: pane };
}

export function select(state: ViewState, id: string | null): ViewState {
  return { ...state, selectedId: id };
}
