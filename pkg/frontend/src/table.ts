/** Table pane: flat element listing with flag chips. */

import { escapeHtml } from "./graph.js";
import type { CaseDocument, ElementRecord } from "./types.js";

export interface TableRow {
  id: string;
  kind: string;
  statement: string;
  flags: string[];
}

export function buildTable(doc: CaseDocument): TableRow[] {
  return [...doc.elements]
    .sort((a, b) => (a.id < b.id ? -1 : 1))
    .map((e: ElementRecord) => ({
      id: e.id,
      kind: e.kind,
      statement: e.statement,
      flags: Object.entries(e.flags ?? {})
        .filter(([, v]) => v !== undefined)
        .map(([k, v]) => (v === true ? k : `${k}=${v}`))
        .sort(),
    }));
}

export function renderTableHtml(doc: CaseDocument, overlay: Set<string> = new Set()): string {
  const rows = buildTable(doc)
    .map((row) => {
      const classes = overlay.has(row.id) ? ' class="highlight"' : "";
      const chips = row.flags.map((f) => `<span class="flag">${escapeHtml(f)}</span>`).join(" ");
      return (
        `<tr${classes} data-id="${escapeHtml(row.id)}"><td>${escapeHtml(row.id)}</td>` +
        `<td>${row.kind}</td><td>${escapeHtml(row.statement)}</td><td>${chips}</td></tr>`
      );
    })
    .join("");
  return (
    '<table class="case-table"><thead><tr><th>id</th><th>kind</th>' +
    `<th>statement</th><th>flags</th></tr></thead><tbody>${rows}</tbody></table>`
  );
}
