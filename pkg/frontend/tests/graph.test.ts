import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import {
  GraphEditor,
  gridPosition,
  importGraph,
  serializeGraph,
  serializePositions,
  wouldCreateCycle,
  type EditAction,
} from "../src/graph.js";

const fixture = (name: string): string =>
  readFileSync(new URL(`./fixtures/${name}`, import.meta.url), "utf8");

function pipelineEditor(): GraphEditor {
  const editor = new GraphEditor();
  const steps: EditAction[] = [
    { kind: "add-node", id: "n1", concept: "read-list", x: 60, y: 60 },
    { kind: "add-node", id: "n2", concept: "ascending-sort", x: 240, y: 60 },
    { kind: "add-node", id: "n3", concept: "print-list", x: 420, y: 60 },
    { kind: "connect", from: "n1", to: "n2" },
    { kind: "connect", from: "n2", to: "n3" },
  ];
  for (const step of steps) {
    const result = editor.apply(step);
    expect(result.ok).toBe(true);
  }
  return editor;
}

describe("export", () => {
  it("serializes the pipeline byte-identically to the backend's file", () => {
    const editor = pipelineEditor();
    expect(serializeGraph(editor.exportGraph())).toBe(
      fixture("pipeline.cmap.json"),
    );
  });

  it("sorts nodes, edges, and binding keys", () => {
    const editor = new GraphEditor();
    editor.apply({ kind: "add-node", id: "b", concept: "print-list", x: 0, y: 0 });
    editor.apply({ kind: "add-node", id: "a", concept: "read-list", x: 0, y: 0 });
    editor.apply({ kind: "add-node", id: "c", concept: "identity", x: 0, y: 0 });
    editor.apply({ kind: "connect", from: "c", to: "b" });
    editor.apply({ kind: "connect", from: "a", to: "b" });
    editor.apply({ kind: "set-binding", node: "b", input: "xs", source: "a.xs" });
    const payload = editor.exportGraph();
    expect(payload.nodes.map((n) => n.id)).toEqual(["a", "b", "c"]);
    expect(payload.edges).toEqual([["a", "b"], ["c", "b"]]);
    expect(payload.nodes[1]!.bindings).toEqual({ xs: "a.xs" });
  });

  it("round-trips through import, with and without the sidecar", () => {
    const editor = pipelineEditor();
    editor.apply({ kind: "set-binding", node: "n3", input: "xs", source: "n2.xs" });
    const graphText = serializeGraph(editor.exportGraph());
    const sidecarText = serializePositions(editor.exportPositions());

    const withSidecar = importGraph(graphText, sidecarText);
    expect(serializeGraph(withSidecar.exportGraph())).toBe(graphText);
    expect(withSidecar.state.positions["n2"]).toEqual({ x: 240, y: 60 });
    expect(withSidecar.state.dirty).toBe(false);
    expect(withSidecar.undoDepth).toBe(0);

    const withoutSidecar = importGraph(graphText);
    expect(serializeGraph(withoutSidecar.exportGraph())).toBe(graphText);
    expect(withoutSidecar.state.positions["n1"]).toEqual(gridPosition(0));
  });

  it("rejects malformed files with a message", () => {
    expect(() => importGraph("not json")).toThrow(/not valid JSON/);
    expect(() => importGraph(`{"version": 2, "nodes": [], "edges": []}`))
      .toThrow(/version/);
    expect(() =>
      importGraph(`{"version": 1, "nodes": [{"id": "a", "concept": "x"}],
                    "edges": [["a", "missing"]]}`),
    ).toThrow(/no node named 'missing'/);
  });
});

describe("editing", () => {
  it("rejects duplicate node ids and empty fields", () => {
    const editor = new GraphEditor();
    editor.apply({ kind: "add-node", id: "n1", concept: "identity", x: 0, y: 0 });
    const dup = editor.apply({ kind: "add-node", id: "n1", concept: "identity", x: 0, y: 0 });
    expect(dup).toEqual({ ok: false, message: "node 'n1' already exists" });
    const blank = editor.apply({ kind: "add-node", id: "  ", concept: "identity", x: 0, y: 0 });
    expect(blank.ok).toBe(false);
  });

  it("rejects a connect that closes a cycle, with an inline message", () => {
    const editor = new GraphEditor();
    editor.apply({ kind: "add-node", id: "n1", concept: "identity", x: 0, y: 0 });
    editor.apply({ kind: "add-node", id: "n2", concept: "identity", x: 0, y: 0 });
    expect(editor.apply({ kind: "connect", from: "n1", to: "n2" }).ok).toBe(true);
    const back = editor.apply({ kind: "connect", from: "n2", to: "n1" });
    expect(back).toEqual({
      ok: false,
      message: "connecting n2 → n1 would create a cycle",
    });
    const self = editor.apply({ kind: "connect", from: "n1", to: "n1" });
    expect(self.ok).toBe(false);
    if (!self.ok) expect(self.message).toMatch(/cycle/);
  });

  it("rejects duplicate edges and unknown endpoints", () => {
    const editor = new GraphEditor();
    editor.apply({ kind: "add-node", id: "n1", concept: "identity", x: 0, y: 0 });
    editor.apply({ kind: "add-node", id: "n2", concept: "identity", x: 0, y: 0 });
    editor.apply({ kind: "connect", from: "n1", to: "n2" });
    expect(editor.apply({ kind: "connect", from: "n1", to: "n2" }).ok).toBe(false);
    expect(editor.apply({ kind: "connect", from: "zz", to: "n2" }).ok).toBe(false);
  });

  it("validates bindings: shape, source node, upstream requirement", () => {
    const editor = pipelineEditor();
    const badShape = editor.apply({ kind: "set-binding", node: "n3", input: "xs", source: "nodots" });
    expect(badShape.ok).toBe(false);
    const unknown = editor.apply({ kind: "set-binding", node: "n3", input: "xs", source: "zz.out" });
    expect(unknown.ok).toBe(false);
    const downstream = editor.apply({ kind: "set-binding", node: "n1", input: "xs", source: "n3.xs" });
    expect(downstream).toEqual({
      ok: false,
      message: "'n3' is not upstream of 'n1'",
    });
    const good = editor.apply({ kind: "set-binding", node: "n3", input: "xs", source: "n1.xs" });
    expect(good.ok).toBe(true);
    expect(editor.node("n3")!.bindings).toEqual({ xs: "n1.xs" });
  });

  it("delete removes edges, position, and bindings pointing at the node", () => {
    const editor = pipelineEditor();
    editor.apply({ kind: "set-binding", node: "n3", input: "xs", source: "n1.xs" });
    expect(editor.apply({ kind: "delete", id: "n1" }).ok).toBe(true);
    expect(editor.state.nodes.map((n) => n.id)).toEqual(["n2", "n3"]);
    expect(editor.state.edges).toEqual([["n2", "n3"]]);
    expect(editor.state.positions["n1"]).toBeUndefined();
    expect(editor.node("n3")!.bindings).toEqual({});
  });
});

describe("undo", () => {
  it("keeps at least 20 levels and restores exact prior states", () => {
    expect(GraphEditor.UNDO_DEPTH).toBeGreaterThanOrEqual(20);
    const editor = new GraphEditor();
    const exports: string[] = [serializeGraph(editor.exportGraph())];
    for (let i = 1; i <= 25; i += 1) {
      editor.apply({ kind: "add-node", id: `n${i}`, concept: "identity", x: i, y: i });
      exports.push(serializeGraph(editor.exportGraph()));
    }
    for (let i = 25; i >= 1; i -= 1) {
      expect(editor.undo()).toBe(true);
      expect(serializeGraph(editor.exportGraph())).toBe(exports[i - 1]);
    }
    expect(editor.undo()).toBe(false);
  });

  it("does not burn an undo level on a rejected action", () => {
    const editor = pipelineEditor();
    const before = editor.undoDepth;
    editor.apply({ kind: "connect", from: "n3", to: "n1" });
    expect(editor.undoDepth).toBe(before);
  });
});

interface ScriptOp {
  op: "add-node" | "connect" | "delete";
  id?: string;
  concept?: string;
  from?: string;
  to?: string;
  verdict?: "accepted" | "rejected";
}

interface Script {
  ops: ScriptOp[];
  final: { nodes: string[]; edges: [string, string][] };
}

describe("safety parity with the service", () => {
  it("matches the backend verdict on every scripted connect", () => {
    const scripts = (
      JSON.parse(fixture("edit_scripts.json")) as { scripts: Script[] }
    ).scripts;
    expect(scripts.length).toBe(50);

    let connects = 0;
    let accepted = 0;
    let rejected = 0;
    for (const script of scripts) {
      const editor = new GraphEditor();
      for (const op of script.ops) {
        if (op.op === "add-node") {
          const result = editor.apply({
            kind: "add-node", id: op.id!, concept: op.concept!, x: 0, y: 0,
          });
          expect(result.ok).toBe(true);
        } else if (op.op === "delete") {
          expect(editor.apply({ kind: "delete", id: op.id! }).ok).toBe(true);
        } else {
          connects += 1;
          const result = editor.apply({
            kind: "connect", from: op.from!, to: op.to!,
          });
          const clientVerdict = result.ok ? "accepted" : "rejected";
          expect(clientVerdict, `connect ${op.from} -> ${op.to}`).toBe(op.verdict);
          if (result.ok) accepted += 1;
          else rejected += 1;
        }
      }
      const payload = editor.exportGraph();
      expect(payload.nodes.map((n) => n.id)).toEqual(script.final.nodes);
      expect(payload.edges).toEqual(script.final.edges);
    }
    // the fixture must exercise both outcomes to mean anything
    expect(connects).toBeGreaterThanOrEqual(200);
    expect(accepted).toBeGreaterThanOrEqual(50);
    expect(rejected).toBeGreaterThanOrEqual(50);
  });
});

describe("wouldCreateCycle", () => {
  it("finds cycles through longer paths", () => {
    const edges: [string, string][] = [["a", "b"], ["b", "c"], ["c", "d"]];
    expect(wouldCreateCycle(edges, "d", "a")).toBe(true);
    expect(wouldCreateCycle(edges, "a", "d")).toBe(false);
    expect(wouldCreateCycle(edges, "x", "x")).toBe(true);
  });
});
