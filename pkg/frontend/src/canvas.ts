/**
 * SVG rendering of the canvas state. Pure string output; the shell in
 * main.ts owns hit-testing and drag state.
 */

import { escapeHtml } from "./html.js";
import type { CanvasState, Position } from "./graph.js";

export const NODE_WIDTH = 150;
export const NODE_HEIGHT = 54;

function center(at: Position): Position {
  return { x: at.x + NODE_WIDTH / 2, y: at.y + NODE_HEIGHT / 2 };
}

function renderEdge(state: CanvasState, from: string, to: string): string {
  const a = state.positions[from];
  const b = state.positions[to];
  if (!a || !b) return "";
  const start = center(a);
  const end = center(b);
  const mid = { x: (start.x + end.x) / 2, y: (start.y + end.y) / 2 };

  // chips for bindings whose source lives on this edge
  const target = state.nodes.find((n) => n.id === to);
  const chips: string[] = [];
  for (const [input, source] of Object.entries(target?.bindings ?? {})) {
    if (source.startsWith(`${from}.`)) chips.push(`${input} ← ${source}`);
  }
  const chip = chips.length
    ? `<text class="binding-chip" x="${mid.x}" y="${mid.y - 8}">${escapeHtml(chips.join(", "))}</text>`
    : "";
  return (
    `<line class="edge" data-from="${escapeHtml(from)}" data-to="${escapeHtml(to)}"` +
    ` x1="${start.x}" y1="${start.y}" x2="${end.x}" y2="${end.y}"` +
    ` marker-end="url(#arrow)"/>` + chip
  );
}

function renderNode(state: CanvasState, id: string): string {
  const node = state.nodes.find((n) => n.id === id);
  const at = state.positions[id];
  if (!node || !at) return "";
  const selected = state.selection === id ? " selected" : "";
  const bindings = Object.keys(node.bindings).length;
  const badge = bindings
    ? `<tspan class="binding-count"> •${bindings}</tspan>`
    : "";
  return (
    `<g class="node${selected}" data-node-id="${escapeHtml(id)}"` +
    ` transform="translate(${at.x}, ${at.y})">` +
    `<rect width="${NODE_WIDTH}" height="${NODE_HEIGHT}" rx="8"/>` +
    `<text class="node-id" x="10" y="20">${escapeHtml(id)}${badge}</text>` +
    `<text class="node-concept" x="10" y="40">${escapeHtml(node.concept)}</text>` +
    `</g>`
  );
}

export function renderCanvas(state: CanvasState): string {
  const edges = state.edges.map(([a, b]) => renderEdge(state, a, b)).join("");
  const nodes = state.nodes.map((n) => renderNode(state, n.id)).join("");
  const hint = state.nodes.length
    ? ""
    : `<text class="canvas-hint" x="40" y="60">Drag concepts from the palette to start.</text>`;
  return (
    `<svg class="canvas" xmlns="http://www.w3.org/2000/svg">` +
    `<defs><marker id="arrow" viewBox="0 0 10 10" refX="22" refY="5"` +
    ` markerWidth="7" markerHeight="7" orient="auto-start-reverse">` +
    `<path d="M 0 0 L 10 5 L 0 10 z"/></marker></defs>` +
    `${hint}${edges}${nodes}</svg>`
  );
}
