/**
 * Annotation form: turn a harvested candidate (or a blank form) into a
 * draft concept for POST /api/import. Client-side checks stop obviously
 * bad submissions before a request is made; server parse errors map back
 * to a caret position in the snippet editor.
 */

import type { ApiErrorPayload, Candidate } from "./api.js";
import { escapeHtml } from "./html.js";

export const DTYPES = ["int", "real", "bool", "str", "list"] as const;

export interface VarRow {
  name: string;
  dtype: string;
}

export interface DraftForm {
  id: string;
  name: string;
  description: string;
  keywords: string;
  inputs: VarRow[];
  outputs: VarRow[];
  snippet: string;
}

export function emptyForm(): DraftForm {
  return {
    id: "",
    name: "",
    description: "",
    keywords: "",
    inputs: [],
    outputs: [],
    snippet: "",
  };
}

/** Prefill the form from a harvested candidate. */
export function candidateToForm(candidate: Candidate): DraftForm {
  const stem = candidate.title.replace(/\.[a-z0-9]+$/i, "");
  const id = stem
    .toLowerCase()
    .replace(/[^a-z0-9]+/g, "-")
    .replace(/^-+|-+$/g, "");
  return {
    ...emptyForm(),
    id,
    name: stem.replace(/[_-]+/g, " ").trim(),
    snippet: candidate.excerpt,
  };
}

const ID_SHAPE = /^[a-z0-9][a-z0-9-]*$/;
const NAME_SHAPE = /^[A-Za-z_][A-Za-z0-9_]*$/;

/** Field-level validation; an empty map means the form can be sent. */
export function validateDraft(form: DraftForm): Record<string, string> {
  const errors: Record<string, string> = {};
  if (!form.name.trim()) errors.name = "name is required";
  if (!form.id.trim()) errors.id = "id is required";
  else if (!ID_SHAPE.test(form.id))
    errors.id = "id must be lowercase letters, digits, and dashes";
  const seen = new Set<string>();
  form.inputs.forEach((row, index) => {
    const key = `inputs.${index}`;
    if (!NAME_SHAPE.test(row.name)) errors[key] = "bad variable name";
    else if (seen.has(row.name)) errors[key] = `duplicate name '${row.name}'`;
    seen.add(row.name);
    if (!DTYPES.includes(row.dtype as (typeof DTYPES)[number]))
      errors[key] = `unknown dtype '${row.dtype}'`;
  });
  form.outputs.forEach((row, index) => {
    const key = `outputs.${index}`;
    if (!NAME_SHAPE.test(row.name)) errors[key] = "bad variable name";
    if (!DTYPES.includes(row.dtype as (typeof DTYPES)[number]))
      errors[key] = `unknown dtype '${row.dtype}'`;
  });
  return errors;
}

/**
 * Concept payload for the import endpoint. An empty snippet is omitted so
 * the server fetches the candidate's locator content instead.
 */
export function draftPayload(form: DraftForm): Record<string, unknown> {
  const payload: Record<string, unknown> = {
    id: form.id,
    name: form.name,
    description: form.description,
    kind: "terminal",
    inputs: form.inputs.map((r) => ({ name: r.name, dtype: r.dtype })),
    outputs: form.outputs.map((r) => ({ name: r.name, dtype: r.dtype })),
    keywords: form.keywords
      .split(",")
      .map((k) => k.trim())
      .filter((k) => k.length > 0),
  };
  if (form.snippet.trim().length > 0) payload.snippet = form.snippet;
  return payload;
}

/** Caret target for a server-reported snippet parse error. */
export function caretPosition(
  err: ApiErrorPayload,
): { line: number; column: number } | null {
  if (err.code !== "snippet-parse") return null;
  const line = err.detail.line;
  const column = err.detail.column;
  if (typeof line !== "number") return null;
  return { line, column: typeof column === "number" ? column : 1 };
}

/** Character offset of (1-indexed) line/column in the given text. */
export function caretOffset(
  text: string,
  at: { line: number; column: number },
): number {
  const lines = text.split("\n");
  let offset = 0;
  for (let i = 0; i < at.line - 1 && i < lines.length; i += 1) {
    offset += lines[i]!.length + 1;
  }
  return Math.min(offset + at.column - 1, text.length);
}

function varRows(kind: "inputs" | "outputs", rows: VarRow[],
                 errors: Record<string, string>): string {
  const options = (selected: string) =>
    DTYPES.map(
      (d) => `<option value="${d}"${d === selected ? " selected" : ""}>${d}</option>`,
    ).join("");
  const body = rows
    .map((row, index) => {
      const err = errors[`${kind}.${index}`];
      const note = err ? `<span class="field-error">${escapeHtml(err)}</span>` : "";
      return (
        `<div class="var-row" data-kind="${kind}" data-index="${index}">` +
        `<input class="var-name" value="${escapeHtml(row.name)}" placeholder="name"/>` +
        `<select class="var-dtype">${options(row.dtype)}</select>` +
        `<button type="button" class="remove-var">×</button>${note}</div>`
      );
    })
    .join("");
  return (
    `<fieldset class="vars" data-kind="${kind}"><legend>${kind}</legend>${body}` +
    `<button type="button" class="add-var" data-kind="${kind}">add ${kind.slice(0, -1)}</button>` +
    `</fieldset>`
  );
}

export function renderAnnotateForm(
  form: DraftForm,
  errors: Record<string, string>,
  serverError: ApiErrorPayload | null = null,
): string {
  const field = (key: keyof DraftForm, label: string, value: string) => {
    const err = errors[key]
      ? `<span class="field-error">${escapeHtml(errors[key]!)}</span>`
      : "";
    return (
      `<label>${label}<input name="${key}" value="${escapeHtml(value)}"/>${err}</label>`
    );
  };
  const serverNote = serverError
    ? `<div class="error-card" data-code="${escapeHtml(serverError.code)}">` +
      `<span class="stage-tag">${escapeHtml(serverError.stage ?? "service")}</span>` +
      `<p>${escapeHtml(serverError.message)}</p></div>`
    : "";
  return (
    `<form class="annotate-form">` +
    field("id", "id", form.id) +
    field("name", "name", form.name) +
    field("description", "description", form.description) +
    field("keywords", "keywords (comma separated)", form.keywords) +
    varRows("inputs", form.inputs, errors) +
    varRows("outputs", form.outputs, errors) +
    `<label>snippet<textarea name="snippet" rows="10" spellcheck="false">` +
    `${escapeHtml(form.snippet)}</textarea></label>` +
    `${serverNote}<button type="submit">import concept</button></form>`
  );
}
