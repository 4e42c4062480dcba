import { describe, expect, it } from "vitest";

import { buildTree, nodeClasses, renderTreeHtml } from "../src/tree.js";
import type { CaseDocument, Envelope } from "../src/types.js";
import { fixture } from "./mockService.js";

const settled = fixture<Envelope<CaseDocument>>("case_settled_with_defeater.json").data;

describe("tree view", () => {
  it("roots the tree at the top-level goal, main argument first", () => {
    const roots = buildTree(settled);
    expect(roots[0]?.id).toBe("G-root");
    const rootIds = roots.map((r) => r.id);
    expect(rootIds).not.toContain("D-jailbreak"); // defeaters are not argument roots
    expect(rootIds).toContain("G-conf-perplexity"); // detached confidence argument
  });

  it("nests children along supportedBy edges", () => {
    const [root] = buildTree(settled);
    const strategy = root?.children.find((c) => c.id === "S-depth");
    expect(strategy).toBeDefined();
    const attack = strategy?.children.find((c) => c.id === "G-attack-resistance");
    expect(attack?.children.map((c) => c.id)).toContain("Sn-redteam");
  });

  it("styles flags: defeated struck, inDoubt warned, invalid muted", () => {
    const [root] = buildTree(settled);
    const strategy = root?.children.find((c) => c.id === "S-depth");
    const attack = strategy?.children.find((c) => c.id === "G-attack-resistance");
    expect(attack?.classes).toContain("struck");
    expect(attack?.classes).toContain("warn");
    expect(nodeClasses({ valid: false }, false)).toContain("muted");
  });

  it("highlights overlay members", () => {
    const roots = buildTree(settled, new Set(["G-attack-resistance"]));
    const attack = roots[0]?.children
      .find((c) => c.id === "S-depth")
      ?.children.find((c) => c.id === "G-attack-resistance");
    expect(attack?.classes).toContain("highlight");
    const html = renderTreeHtml(roots);
    expect(html).toContain('class="node struck warn highlight"');
  });

  it("renders an empty state for a case without goals", () => {
    const empty: CaseDocument = {
      format_version: "1.0",
      case: { id: "AC", kind: "AssuranceCase" },
      elements: [],
      relationships: [],
      containers: [],
    };
    expect(renderTreeHtml(buildTree(empty))).toContain("empty-state");
  });

  it("escapes statements in the HTML rendering", () => {
    const doc: CaseDocument = {
      format_version: "1.0",
      case: { id: "AC", kind: "AssuranceCase" },
      elements: [
        {
          id: "G1",
          kind: "Goal",
          statement: 'claims & <scripts> are "escaped"',
          flags: { topLevel: true },
        },
      ],
      relationships: [],
      containers: [],
    };
    const html = renderTreeHtml(buildTree(doc));
    expect(html).toContain("claims &amp; &lt;scripts&gt; are &quot;escaped&quot;");
  });

  it("keeps cyclic support from recursing forever", () => {
    const doc: CaseDocument = {
      format_version: "1.0",
      case: { id: "AC", kind: "AssuranceCase" },
      elements: [
        { id: "G1", kind: "Goal", statement: "a", flags: { topLevel: true } },
        { id: "G2", kind: "Goal", statement: "b" },
      ],
      relationships: [
        { id: "R1", subject: "G1", predicate: "supportedBy", object: "G2" },
        { id: "R2", subject: "G2", predicate: "supportedBy", object: "G1" },
      ],
      containers: [],
    };
    const roots = buildTree(doc);
    expect(roots).toHaveLength(1);
    expect(roots[0]?.children[0]?.id).toBe("G2");
    expect(roots[0]?.children[0]?.children).toHaveLength(0);
  });
});
