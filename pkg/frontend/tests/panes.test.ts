import { describe, expect, it } from "vitest";

import { narrativeOrder, renderNarrativeHtml } from "../src/document.js";
import { buildLayers, renderLayersHtml } from "../src/layers.js";
import { buildTable, renderTableHtml } from "../src/table.js";
import type { CaseDocument, Envelope } from "../src/types.js";
import { fixture } from "./mockService.js";

const settled = fixture<Envelope<CaseDocument>>("case_settled_with_defeater.json").data;

describe("layer view", () => {
  it("stacks goals by supportedBy depth", () => {
    const layers = buildLayers(settled);
    expect(layers[0]).toEqual({ depth: 0, ids: ["G-conf-perplexity", "G-root"] });
    const depth2 = layers.find((l) => l.depth === 2);
    expect(depth2?.ids).toEqual([
      "G-attack-resistance",
      "G-filtering",
      "G-monitoring",
      "G-perturbation-robustness",
    ]);
    const depth3 = layers.find((l) => l.depth === 3);
    expect(depth3?.ids).toEqual(["G-benchmark-coverage"]);
  });

  it("renders chips with flag styling", () => {
    const html = renderLayersHtml(settled);
    expect(html).toMatch(/class="chip struck warn"[^>]*data-id="G-attack-resistance"/);
  });
});

describe("document pane", () => {
  it("orders the narrative from the main root, contexts first", () => {
    const order = narrativeOrder(settled);
    expect(order[0]).toBe("G-root");
    expect(order.indexOf("C-gpt-scope")).toBeLessThan(order.indexOf("S-depth"));
    expect(order.indexOf("S-depth")).toBeLessThan(order.indexOf("G-attack-resistance"));
    // every element appears exactly once
    expect(new Set(order).size).toBe(settled.elements.length);
    expect(order.length).toBe(settled.elements.length);
  });

  it("renders one line per element", () => {
    const html = renderNarrativeHtml(settled);
    expect(html.match(/narrative-line/g)?.length).toBe(settled.elements.length);
  });
});

describe("table pane", () => {
  it("lists every element with its flags", () => {
    const rows = buildTable(settled);
    expect(rows.length).toBe(settled.elements.length);
    const attack = rows.find((r) => r.id === "G-attack-resistance");
    expect(attack?.flags).toContain("defeated");
    expect(attack?.flags).toContain("truth=false");
  });

  it("highlights overlay members", () => {
    const html = renderTableHtml(settled, new Set(["Sn-filter-eval"]));
    expect(html).toMatch(/<tr class="highlight" data-id="Sn-filter-eval">/);
  });
});
