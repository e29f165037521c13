/**
 * Snippet search panel: a query box backed by GET /api/search and a
 * ranked candidate list. Selecting a candidate hands it to the
 * annotation form.
 */

import type { HarvestResult } from "./api.js";
import { escapeHtml } from "./html.js";

export function renderCandidateList(result: HarvestResult): string {
  const keywords = result.keywords.map(escapeHtml).join(", ");
  if (result.candidates.length === 0) {
    return (
      `<p class="empty-state">No candidates for keywords: ${keywords}.</p>`
    );
  }
  const items = result.candidates
    .map((c, index) => {
      return (
        `<li class="candidate" data-index="${index}">` +
        `<header><strong>${escapeHtml(c.title)}</strong>` +
        `<span class="provider">${escapeHtml(c.provider)}</span>` +
        `<span class="score">${c.score.toFixed(2)}</span></header>` +
        `<pre class="excerpt">${escapeHtml(c.excerpt)}</pre>` +
        `<button type="button" class="pick-candidate" data-index="${index}">` +
        `annotate and import</button></li>`
      );
    })
    .join("");
  return (
    `<p class="keywords">keywords: ${keywords}</p>` +
    `<ol class="candidate-list">${items}</ol>`
  );
}
