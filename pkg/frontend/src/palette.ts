/**
 * Concept palette: the hierarchy rendered as an expandable tree.
 *
 * The hierarchy itself is a DAG; the tree view duplicates any concept
 * with several parents under each of them. Filtering keeps a branch
 * whenever the branch head or any descendant survives the keyword
 * ranking.
 */

import type { HierarchyView } from "./api.js";
import { escapeHtml } from "./html.js";

export interface PaletteEntry {
  id: string;
  name: string;
  kind: string;
  children: PaletteEntry[];
}

const compare = (a: string, b: string) => (a < b ? -1 : a > b ? 1 : 0);

export function buildPaletteTree(view: HierarchyView): PaletteEntry[] {
  const meta = new Map(view.concepts.map((c) => [c.id, c]));
  const childrenOf = new Map<string, string[]>();
  const hasParent = new Set<string>();
  for (const [child, parent] of view.isa) {
    const kids = childrenOf.get(parent) ?? [];
    kids.push(child);
    childrenOf.set(parent, kids);
    hasParent.add(child);
  }

  const build = (id: string): PaletteEntry => {
    const info = meta.get(id) ?? { id, name: id, kind: "abstract" };
    const kids = (childrenOf.get(id) ?? []).sort(compare).map(build);
    return { id, name: info.name, kind: info.kind, children: kids };
  };

  return view.concepts
    .map((c) => c.id)
    .filter((id) => !hasParent.has(id))
    .sort(compare)
    .map(build);
}

/** Keep entries whose id is in `keep`, or that own a kept descendant. */
export function filterTree(
  entries: PaletteEntry[],
  keep: Set<string>,
): PaletteEntry[] {
  const result: PaletteEntry[] = [];
  for (const entry of entries) {
    const children = filterTree(entry.children, keep);
    if (keep.has(entry.id) || children.length > 0) {
      result.push({ ...entry, children });
    }
  }
  return result;
}

function renderEntry(entry: PaletteEntry): string {
  const id = escapeHtml(entry.id);
  const label =
    `<span class="palette-item" draggable="true" data-concept-id="${id}">` +
    `${escapeHtml(entry.name)}` +
    `<span class="kind kind-${escapeHtml(entry.kind)}">${escapeHtml(entry.kind)}</span>` +
    `</span>`;
  if (entry.children.length === 0) {
    return `<li>${label}</li>`;
  }
  const children = entry.children.map(renderEntry).join("");
  return `<li><details open><summary>${label}</summary><ul>${children}</ul></details></li>`;
}

export function renderPalette(entries: PaletteEntry[]): string {
  if (entries.length === 0) {
    return `<p class="empty-state">No concepts yet. Add one below or harvest a snippet.</p>`;
  }
  return `<ul class="palette-tree">${entries.map(renderEntry).join("")}</ul>`;
}
