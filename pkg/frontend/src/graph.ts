/**
 * Canvas graph state and editing.
 *
 * The graph mirrors the backend's .cmap.json contract: nodes reference
 * concepts by id, edges state precedence. Every edit goes through
 * GraphEditor.apply, which validates first (cycle-creating connects are
 * rejected before any server call) and snapshots for undo. Export is
 * byte-compatible with the files the backend writes: sorted nodes and
 * edges, two-space indent, trailing newline.
 */

import type { ApiErrorPayload, GenerateResult } from "./api.js";

export interface GraphNodePayload {
  id: string;
  concept: string;
  bindings?: Record<string, string>;
}

export interface ConceptGraphPayload {
  version: 1;
  nodes: GraphNodePayload[];
  edges: [string, string][];
}

export interface Position {
  x: number;
  y: number;
}

export interface PositionSidecar {
  version: 1;
  positions: Record<string, Position>;
}

export interface CanvasNode {
  id: string;
  concept: string;
  bindings: Record<string, string>;
}

export interface CanvasState {
  nodes: CanvasNode[];
  edges: [string, string][];
  positions: Record<string, Position>;
  selection: string | null;
  dirty: boolean;
  lastResult: GenerateResult | ApiErrorPayload | null;
}

export type EditAction =
  | { kind: "add-node"; id: string; concept: string; x: number; y: number }
  | { kind: "connect"; from: string; to: string }
  | { kind: "set-binding"; node: string; input: string; source: string }
  | { kind: "delete"; id: string };

export type EditResult = { ok: true } | { ok: false; message: string };

export function emptyState(): CanvasState {
  return {
    nodes: [],
    edges: [],
    positions: {},
    selection: null,
    dirty: false,
    lastResult: null,
  };
}

/**
 * True when adding from -> to would close a cycle: DFS from `to` along
 * existing edges, looking for `from`.
 */
export function wouldCreateCycle(
  edges: [string, string][],
  from: string,
  to: string,
): boolean {
  if (from === to) return true;
  const adjacency = new Map<string, string[]>();
  for (const [a, b] of edges) {
    const next = adjacency.get(a) ?? [];
    next.push(b);
    adjacency.set(a, next);
  }
  const stack = [to];
  const seen = new Set<string>();
  while (stack.length > 0) {
    const current = stack.pop()!;
    if (current === from) return true;
    if (seen.has(current)) continue;
    seen.add(current);
    for (const next of adjacency.get(current) ?? []) {
      if (!seen.has(next)) stack.push(next);
    }
  }
  return false;
}

/** Node ids that can reach `target` by following edges forward. */
export function upstreamOf(
  edges: [string, string][],
  target: string,
): Set<string> {
  const incoming = new Map<string, string[]>();
  for (const [a, b] of edges) {
    const from = incoming.get(b) ?? [];
    from.push(a);
    incoming.set(b, from);
  }
  const result = new Set<string>();
  const stack = [target];
  while (stack.length > 0) {
    const current = stack.pop()!;
    for (const prev of incoming.get(current) ?? []) {
      if (!result.has(prev)) {
        result.add(prev);
        stack.push(prev);
      }
    }
  }
  return result;
}

const compare = (a: string, b: string) => (a < b ? -1 : a > b ? 1 : 0);

export class GraphEditor {
  static readonly UNDO_DEPTH = 50;

  state: CanvasState = emptyState();
  private undoStack: CanvasState[] = [];

  private snapshot(): CanvasState {
    return {
      nodes: this.state.nodes.map((n) => ({ ...n, bindings: { ...n.bindings } })),
      edges: this.state.edges.map(([a, b]) => [a, b] as [string, string]),
      positions: Object.fromEntries(
        Object.entries(this.state.positions).map(([k, v]) => [k, { ...v }]),
      ),
      selection: this.state.selection,
      dirty: this.state.dirty,
      lastResult: this.state.lastResult,
    };
  }

  private pushUndo(): void {
    this.undoStack.push(this.snapshot());
    if (this.undoStack.length > GraphEditor.UNDO_DEPTH) this.undoStack.shift();
  }

  get undoDepth(): number {
    return this.undoStack.length;
  }

  undo(): boolean {
    const prev = this.undoStack.pop();
    if (!prev) return false;
    this.state = prev;
    return true;
  }

  clearHistory(): void {
    this.undoStack = [];
  }

  node(id: string): CanvasNode | undefined {
    return this.state.nodes.find((n) => n.id === id);
  }

  private validate(action: EditAction): string | null {
    switch (action.kind) {
      case "add-node": {
        if (!action.id.trim()) return "node id must not be empty";
        if (!action.concept.trim()) return "node needs a concept id";
        if (this.node(action.id)) return `node '${action.id}' already exists`;
        return null;
      }
      case "connect": {
        if (!this.node(action.from)) return `no node named '${action.from}'`;
        if (!this.node(action.to)) return `no node named '${action.to}'`;
        if (this.state.edges.some(([a, b]) => a === action.from && b === action.to))
          return `edge ${action.from} → ${action.to} already exists`;
        if (wouldCreateCycle(this.state.edges, action.from, action.to))
          return `connecting ${action.from} → ${action.to} would create a cycle`;
        return null;
      }
      case "set-binding": {
        if (!this.node(action.node)) return `no node named '${action.node}'`;
        if (!action.input.trim()) return "binding needs an input name";
        const dot = action.source.indexOf(".");
        if (dot <= 0 || dot === action.source.length - 1)
          return "binding source must look like 'node.output'";
        const sourceNode = action.source.slice(0, dot);
        if (!this.node(sourceNode)) return `no node named '${sourceNode}'`;
        if (!upstreamOf(this.state.edges, action.node).has(sourceNode))
          return `'${sourceNode}' is not upstream of '${action.node}'`;
        return null;
      }
      case "delete": {
        if (!this.node(action.id)) return `no node named '${action.id}'`;
        return null;
      }
    }
  }

  apply(action: EditAction): EditResult {
    const message = this.validate(action);
    if (message !== null) return { ok: false, message };
    this.pushUndo();
    switch (action.kind) {
      case "add-node":
        this.state.nodes.push({ id: action.id, concept: action.concept, bindings: {} });
        this.state.positions[action.id] = { x: action.x, y: action.y };
        this.state.selection = action.id;
        break;
      case "connect":
        this.state.edges.push([action.from, action.to]);
        break;
      case "set-binding": {
        const node = this.node(action.node)!;
        node.bindings[action.input] = action.source;
        break;
      }
      case "delete": {
        const gone = action.id;
        this.state.nodes = this.state.nodes.filter((n) => n.id !== gone);
        this.state.edges = this.state.edges.filter(([a, b]) => a !== gone && b !== gone);
        delete this.state.positions[gone];
        for (const node of this.state.nodes) {
          for (const [input, source] of Object.entries(node.bindings)) {
            if (source.startsWith(`${gone}.`)) delete node.bindings[input];
          }
        }
        if (this.state.selection === gone) this.state.selection = null;
        break;
      }
    }
    this.state.dirty = true;
    return { ok: true };
  }

  exportGraph(): ConceptGraphPayload {
    const nodes = [...this.state.nodes]
      .sort((a, b) => compare(a.id, b.id))
      .map((n) => {
        const entry: GraphNodePayload = { id: n.id, concept: n.concept };
        const keys = Object.keys(n.bindings).sort(compare);
        if (keys.length > 0) {
          entry.bindings = {};
          for (const key of keys) entry.bindings[key] = n.bindings[key]!;
        }
        return entry;
      });
    const edges = [...this.state.edges].sort(
      (x, y) => compare(x[0], y[0]) || compare(x[1], y[1]),
    );
    return { version: 1, nodes, edges };
  }

  exportPositions(): PositionSidecar {
    const positions: Record<string, Position> = {};
    for (const id of Object.keys(this.state.positions).sort(compare)) {
      const p = this.state.positions[id]!;
      positions[id] = { x: p.x, y: p.y };
    }
    return { version: 1, positions };
  }
}

/** Render a payload exactly as the backend writes its JSON files. */
export function serializeGraph(payload: ConceptGraphPayload): string {
  return JSON.stringify(payload, null, 2) + "\n";
}

export function serializePositions(sidecar: PositionSidecar): string {
  return JSON.stringify(sidecar, null, 2) + "\n";
}

function fail(message: string): never {
  throw new Error(message);
}

/**
 * Build an editor from .cmap.json text plus an optional position sidecar.
 * Dropping the sidecar loses only the layout; nodes fall back to a grid.
 */
export function importGraph(text: string, sidecarText?: string): GraphEditor {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch (err) {
    fail(`graph file is not valid JSON: ${(err as Error).message}`);
  }
  if (typeof raw !== "object" || raw === null) fail("graph file must hold an object");
  const payload = raw as Partial<ConceptGraphPayload>;
  if (payload.version !== 1) fail(`unsupported graph file version: ${payload.version}`);

  let positions: Record<string, Position> = {};
  if (sidecarText !== undefined) {
    try {
      const sidecar = JSON.parse(sidecarText) as Partial<PositionSidecar>;
      positions = sidecar.positions ?? {};
    } catch {
      positions = {}; // a broken sidecar only costs the layout
    }
  }

  const editor = new GraphEditor();
  let placed = 0;
  for (const node of payload.nodes ?? []) {
    if (typeof node.id !== "string" || typeof node.concept !== "string")
      fail("graph node needs 'id' and 'concept' fields");
    const at = positions[node.id] ?? gridPosition(placed);
    const added = editor.apply({
      kind: "add-node", id: node.id, concept: node.concept, x: at.x, y: at.y,
    });
    if (!added.ok) fail(added.message);
    placed += 1;
  }
  for (const edge of payload.edges ?? []) {
    if (!Array.isArray(edge) || edge.length !== 2) fail("edges must be [from, to] pairs");
    const connected = editor.apply({ kind: "connect", from: edge[0], to: edge[1] });
    if (!connected.ok) fail(connected.message);
  }
  // bindings last, so their upstream checks see the full edge set
  for (const node of payload.nodes ?? []) {
    for (const [input, source] of Object.entries(node.bindings ?? {})) {
      const bound = editor.apply({
        kind: "set-binding", node: node.id, input, source,
      });
      if (!bound.ok) fail(bound.message);
    }
  }
  editor.clearHistory();
  editor.state.selection = null;
  editor.state.dirty = false;
  return editor;
}

export function gridPosition(index: number): Position {
  return { x: 60 + (index % 4) * 180, y: 60 + Math.floor(index / 4) * 120 };
}
