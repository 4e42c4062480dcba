import { describe, expect, it } from "vitest";

import {
  applyCaseResponse,
  clearOverlay,
  initialState,
  overlayMembers,
  setOverlay,
  StaleResponseError,
  switchLeft,
  switchRight,
} from "../src/state.js";
import type { CaseDocument, Envelope } from "../src/types.js";
import { fixture } from "./mockService.js";

const canned = fixture<Envelope<CaseDocument>>("case_settled_with_defeater.json");

describe("view state", () => {
  it("adopts case responses and tracks the version", () => {
    const state = applyCaseResponse(initialState(), canned);
    expect(state.version).toBe(canned.version);
    expect(state.document?.case.id).toBe("AC-llm");
    expect(state.renderCount).toBe(1);
  });

  it("refuses responses older than the displayed version", () => {
    let state = applyCaseResponse(initialState(), { ...canned, version: 5 });
    expect(() => applyCaseResponse(state, { ...canned, version: 4 })).toThrow(StaleResponseError);
    state = applyCaseResponse(state, { ...canned, version: 5 });
    expect(state.version).toBe(5);
  });

  it("manages named overlays", () => {
    let state = setOverlay(initialState(), "AE-01", ["G-attack-resistance"]);
    state = setOverlay(state, "selector", ["D-jailbreak", "D-exfil"]);
    expect(overlayMembers(state)).toEqual(
      new Set(["G-attack-resistance", "D-jailbreak", "D-exfil"]),
    );
    state = clearOverlay(state, "AE-01");
    expect(overlayMembers(state)).toEqual(new Set(["D-jailbreak", "D-exfil"]));
  });

  it("switches panes without touching the document", () => {
    let state = applyCaseResponse(initialState(), canned);
    state = switchLeft(state, "document");
    state = switchRight(state, "layers");
    expect(state.activeLeft).toBe("document");
    expect(state.activeRight).toBe("layers");
    expect(state.document).toBe(canned.data);
  });
});
