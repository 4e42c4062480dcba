/** Layer view: goals flattened into rows by supportedBy depth, standing in
 * for the 3D model view as a plain linked-parts list. */

import { argumentRoots, escapeHtml, indexCase } from "./graph.js";
import type { CaseDocument } from "./types.js";
import { nodeClasses } from "./tree.js";

export interface Layer {
  depth: number;
  ids: string[];
}

export function buildLayers(doc: CaseDocument): Layer[] {
  const index = indexCase(doc);
  const depth = new Map<string, number>();
  const queue: [string, number][] = argumentRoots(doc, index).map((r) => [r.id, 0]);
  while (queue.length) {
    const [id, d] = queue.shift()!;
    const known = depth.get(id);
    if (known !== undefined && known <= d) continue;
    depth.set(id, d);
    for (const rel of index.supportedBy.get(id) ?? []) {
      queue.push([rel.object, d + 1]);
    }
  }
  const byDepth = new Map<number, string[]>();
  for (const [id, d] of depth) {
    const element = index.elements.get(id);
    if (!element || element.kind !== "Goal") continue;
    const list = byDepth.get(d) ?? [];
    list.push(id);
    byDepth.set(d, list);
  }
  return [...byDepth.entries()]
    .sort(([a], [b]) => a - b)
    .map(([d, ids]) => ({ depth: d, ids: ids.sort() }));
}

export function renderLayersHtml(doc: CaseDocument, overlay: Set<string> = new Set()): string {
  const index = indexCase(doc);
  const layers = buildLayers(doc);
  if (layers.length === 0) return '<p class="empty-state">No goals to stack.</p>';
  const rows = layers
    .map((layer) => {
      const chips = layer.ids
        .map((id) => {
          const element = index.elements.get(id)!;
          const classes = ["chip", ...nodeClasses(element.flags ?? {}, overlay.has(id))].join(" ");
          return `<span class="${classes}" data-id="${escapeHtml(id)}" title="${escapeHtml(
            element.statement,
          )}">${escapeHtml(id)}</span>`;
        })
        .join(" ");
      return `<div class="layer"><span class="layer-depth">L${layer.depth}</span>${chips}</div>`;
    })
    .join("");
  return `<div class="layers">${rows}</div>`;
}
