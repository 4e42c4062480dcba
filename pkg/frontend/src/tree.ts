/** Tree view: the argument graph as nested nodes.
 *
 * Flag styling: defeated nodes are struck through, inDoubt nodes get a
 * warning accent, invalid nodes are muted, overlay members are highlighted.
 * Every flag comes from the document in the view state; nothing is derived
 * here.
 */

import { argumentRoots, escapeHtml, indexCase } from "./graph.js";
import type { CaseDocument, ElementRecord, FlagMap } from "./types.js";

export interface TreeNode {
  id: string;
  kind: string;
  statement: string;
  flags: FlagMap;
  classes: string[];
  children: TreeNode[];
}

const KIND_BADGE: Record<string, string> = {
  Goal: "G",
  Strategy: "S",
  Solution: "Sn",
  Context: "C",
  Assumption: "A",
  Justification: "J",
  ArtefactReference: "AR",
  InstantiationDataReference: "IDR",
};

export function nodeClasses(flags: FlagMap, highlighted: boolean): string[] {
  const classes: string[] = [];
  if (flags.defeated) classes.push("struck");
  if (flags.inDoubt) classes.push("warn");
  if (flags.valid === false) classes.push("muted");
  if (flags.undeveloped) classes.push("undeveloped");
  if (highlighted) classes.push("highlight");
  return classes;
}

export function buildTree(doc: CaseDocument, overlay: Set<string> = new Set()): TreeNode[] {
  const index = indexCase(doc);

  function node(element: ElementRecord, seen: Set<string>): TreeNode {
    const flags = element.flags ?? {};
    const children: TreeNode[] = [];
    for (const rel of index.supportedBy.get(element.id) ?? []) {
      if (seen.has(rel.object)) continue; // cycles stay visible once
      const child = index.elements.get(rel.object);
      if (child) {
        children.push(node(child, new Set([...seen, rel.object])));
      }
    }
    return {
      id: element.id,
      kind: element.kind,
      statement: element.statement,
      flags,
      classes: nodeClasses(flags, overlay.has(element.id)),
      children,
    };
  }

  return argumentRoots(doc, index).map((root) => node(root, new Set([root.id])));
}

export function renderTreeHtml(roots: TreeNode[]): string {
  if (roots.length === 0) {
    return '<p class="empty-state">No argument loaded: the case has no top-level goal.</p>';
  }
  const item = (n: TreeNode): string => {
    const classes = ["node", ...n.classes].join(" ");
    const badge = KIND_BADGE[n.kind] ?? n.kind;
    const kids = n.children.length
      ? `<ul>${n.children.map((c) => `<li>${item(c)}</li>`).join("")}</ul>`
      : "";
    return (
      `<details open class="${classes}" data-id="${escapeHtml(n.id)}">` +
      `<summary><span class="badge badge-${n.kind}">${badge}</span> ` +
      `<span class="node-id">${escapeHtml(n.id)}</span> ` +
      `<span class="statement">${escapeHtml(n.statement)}</span></summary>${kids}</details>`
    );
  };
  return `<ul class="tree">${roots.map((r) => `<li>${item(r)}</li>`).join("")}</ul>`;
}
