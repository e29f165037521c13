import { describe, expect, it } from "vitest";

import type { HierarchyView } from "../src/api.js";
import { buildPaletteTree, filterTree, renderPalette } from "../src/palette.js";

const view: HierarchyView = {
  concepts: [
    { id: "ascending-sort", name: "ascending sort", kind: "abstract" },
    { id: "descending-sort", name: "descending sort", kind: "abstract" },
    { id: "insertion-sort", name: "insertion sort", kind: "terminal" },
    { id: "merge-sort", name: "merge sort", kind: "complex" },
    { id: "read-list", name: "read list", kind: "terminal" },
  ],
  isa: [
    ["insertion-sort", "ascending-sort"],
    ["insertion-sort", "descending-sort"],
    ["merge-sort", "ascending-sort"],
  ],
};

describe("palette tree", () => {
  it("groups concepts under their parents, roots sorted by id", () => {
    const roots = buildPaletteTree(view);
    expect(roots.map((r) => r.id)).toEqual([
      "ascending-sort",
      "descending-sort",
      "read-list",
    ]);
    const ascending = roots[0]!;
    expect(ascending.children.map((c) => c.id)).toEqual([
      "insertion-sort",
      "merge-sort",
    ]);
  });

  it("shows a multi-parent concept under each parent", () => {
    const roots = buildPaletteTree(view);
    const parentsShowingInsertion = roots.filter((r) =>
      r.children.some((c) => c.id === "insertion-sort"),
    );
    expect(parentsShowingInsertion.map((r) => r.id)).toEqual([
      "ascending-sort",
      "descending-sort",
    ]);
  });

  it("filter keeps a branch when any descendant matches", () => {
    const roots = buildPaletteTree(view);
    const filtered = filterTree(roots, new Set(["merge-sort"]));
    expect(filtered.map((r) => r.id)).toEqual(["ascending-sort"]);
    expect(filtered[0]!.children.map((c) => c.id)).toEqual(["merge-sort"]);
  });

  it("renders an empty-state prompt for an empty store", () => {
    const html = renderPalette(buildPaletteTree({ concepts: [], isa: [] }));
    expect(html).toMatch(/add one below or harvest/i);
  });

  it("marks each entry with its kind and drag payload", () => {
    const html = renderPalette(buildPaletteTree(view));
    expect(html).toContain(`data-concept-id="insertion-sort"`);
    expect(html).toContain(`kind-terminal`);
    expect(html).toContain(`kind-abstract`);
    expect(html).toContain(`kind-complex`);
  });
});
