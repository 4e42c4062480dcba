/** Document pane: the case narrative, statements in argument order
 * (depth-first from each root through supportedBy, contexts first). */

import { argumentRoots, escapeHtml, indexCase } from "./graph.js";
import type { CaseDocument } from "./types.js";

export function narrativeOrder(doc: CaseDocument): string[] {
  const index = indexCase(doc);
  const contexts = new Map<string, string[]>();
  for (const rel of doc.relationships) {
    if (rel.predicate === "inContextOf") {
      const list = contexts.get(rel.subject) ?? [];
      list.push(rel.object);
      contexts.set(rel.subject, list);
    }
  }
  const order: string[] = [];
  const seen = new Set<string>();

  function visit(id: string): void {
    if (seen.has(id) || !index.elements.has(id)) return;
    seen.add(id);
    order.push(id);
    for (const ctx of (contexts.get(id) ?? []).sort()) visit(ctx);
    for (const rel of index.supportedBy.get(id) ?? []) visit(rel.object);
  }

  for (const root of argumentRoots(doc, index)) visit(root.id);
  for (const element of [...doc.elements].sort((a, b) => (a.id < b.id ? -1 : 1))) {
    visit(element.id); // anything unreached (defeaters, prototypes) trails
  }
  return order;
}

export function renderNarrativeHtml(doc: CaseDocument): string {
  const index = indexCase(doc);
  const pieces = narrativeOrder(doc).map((id) => {
    const element = index.elements.get(id)!;
    return `<p class="narrative-line"><strong>${escapeHtml(id)}</strong> (${element.kind}): ${escapeHtml(
      element.statement,
    )}</p>`;
  });
  return `<div class="narrative">${pieces.join("")}</div>`;
}
