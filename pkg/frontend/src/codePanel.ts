/**
 * Generated-code panel.
 *
 * The panel never computes anything itself: it shows exactly the source
 * string the service returned (panelText is the byte-identical content)
 * and uses the provenance map to connect canvas nodes to line ranges.
 */

import type { ApiErrorPayload, GenerateResult } from "./api.js";
import { escapeHtml } from "./html.js";

/** The exact text the panel displays; byte-identical to the response. */
export function panelText(result: GenerateResult): string {
  return result.source;
}

/** 1-indexed inclusive line range a node's call occupies, if any. */
export function linesForNode(
  result: GenerateResult,
  nodeId: string,
): [number, number] | null {
  const range = result.provenance[nodeId];
  return range ? [range[0], range[1]] : null;
}

/** Node whose provenance range covers the given line, if any. */
export function nodeForLine(result: GenerateResult, line: number): string | null {
  for (const [nodeId, [start, end]] of Object.entries(result.provenance)) {
    if (line >= start && line <= end) return nodeId;
  }
  return null;
}

export function renderCodePanel(result: GenerateResult): string {
  const lines = result.source.split("\n");
  // the source ends with a newline; drop the trailing empty segment
  if (lines.length > 0 && lines[lines.length - 1] === "") lines.pop();
  const rows = lines
    .map((text, index) => {
      const line = index + 1;
      const owner = nodeForLine(result, line);
      const ownerAttr = owner ? ` data-node="${escapeHtml(owner)}"` : "";
      return (
        `<div class="code-line" data-line="${line}"${ownerAttr}>` +
        `<span class="line-no">${line}</span>` +
        `<code>${escapeHtml(text)}</code></div>`
      );
    })
    .join("");
  return (
    `<div class="code-panel" data-backend="${escapeHtml(result.backend)}">` +
    `${rows}</div>`
  );
}

interface BindingCandidate {
  node: string;
  output: string;
  dtype: string;
}

function candidateRows(
  detail: Record<string, unknown>,
  withFix: boolean,
): string {
  const input = typeof detail.input === "string" ? detail.input : "";
  const node = typeof detail.node === "string" ? detail.node : "";
  const candidates = Array.isArray(detail.candidates)
    ? (detail.candidates as BindingCandidate[])
    : [];
  return candidates
    .map((c) => {
      const source = `${c.node}.${c.output}`;
      const label = `${escapeHtml(source)} <span class="dtype">${escapeHtml(c.dtype)}</span>`;
      if (!withFix) return `<li>${label}</li>`;
      const fix =
        `<button type="button" class="fix-binding"` +
        ` data-node="${escapeHtml(node)}"` +
        ` data-input="${escapeHtml(input)}"` +
        ` data-source="${escapeHtml(source)}">bind ${escapeHtml(input)} ← ${escapeHtml(source)}</button>`;
      return `<li>${label} ${fix}</li>`;
    })
    .join("");
}

/**
 * Error card for a failed generate. Ambiguous bindings get a one-click
 * fix per candidate; unbound inputs list what upstream actually offers.
 */
export function renderErrorCard(err: ApiErrorPayload): string {
  const stage = err.stage ?? "service";
  let body = "";
  if (err.code === "ambiguous-binding") {
    body = `<ul class="candidates">${candidateRows(err.detail, true)}</ul>`;
  } else if (err.code === "unbound-input") {
    body = `<ul class="candidates">${candidateRows(err.detail, false)}</ul>`;
  }
  return (
    `<div class="error-card" data-code="${escapeHtml(err.code)}">` +
    `<span class="stage-tag">${escapeHtml(stage)}</span>` +
    `<span class="error-code">${escapeHtml(err.code)}</span>` +
    `<p>${escapeHtml(err.message)}</p>${body}</div>`
  );
}
