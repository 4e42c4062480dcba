/** Shared lookups over a case document. */

import type { CaseDocument, ElementRecord, RelationshipRecord } from "./types.js";

export interface CaseIndex {
  elements: Map<string, ElementRecord>;
  supportedBy: Map<string, RelationshipRecord[]>; // subject -> edges
  challengers: Set<string>; // elements with outgoing challenges
}

export function indexCase(doc: CaseDocument): CaseIndex {
  const elements = new Map(doc.elements.map((e) => [e.id, e]));
  const supportedBy = new Map<string, RelationshipRecord[]>();
  const challengers = new Set<string>();
  for (const rel of doc.relationships) {
    if (rel.predicate === "supportedBy") {
      const list = supportedBy.get(rel.subject) ?? [];
      list.push(rel);
      supportedBy.set(rel.subject, list);
    } else if (rel.predicate === "challenges") {
      challengers.add(rel.subject);
    }
  }
  for (const list of supportedBy.values()) {
    list.sort((a, b) => (a.object < b.object ? -1 : 1));
  }
  return { elements, supportedBy, challengers };
}

/** Top-level goals that are not defeaters: the roots of the argument view,
 * main argument (largest subtree) first. */
export function argumentRoots(doc: CaseDocument, index = indexCase(doc)): ElementRecord[] {
  const subtreeSize = (id: string): number => {
    const seen = new Set<string>([id]);
    const stack = [id];
    while (stack.length) {
      for (const rel of index.supportedBy.get(stack.pop()!) ?? []) {
        if (!seen.has(rel.object)) {
          seen.add(rel.object);
          stack.push(rel.object);
        }
      }
    }
    return seen.size;
  };
  return doc.elements
    .filter((e) => e.kind === "Goal" && e.flags?.topLevel && !index.challengers.has(e.id))
    .sort((a, b) => subtreeSize(b.id) - subtreeSize(a.id) || (a.id < b.id ? -1 : 1));
}

export function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}
