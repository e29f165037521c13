import { describe, expect, it } from "vitest";

import type { ApiErrorPayload, Candidate } from "../src/api.js";
import {
  candidateToForm,
  caretOffset,
  caretPosition,
  draftPayload,
  emptyForm,
  validateDraft,
} from "../src/annotate.js";

const candidate: Candidate = {
  provider: "local",
  locator: "/corpus/merge_sorted_lists.mini",
  title: "merge_sorted_lists.mini",
  excerpt: "func merge(a: list, b: list) -> list {\n    return a;\n}\n",
  score: 1.0,
  fetched_at: "2026-08-19T00:00:00Z",
};

describe("form prefill", () => {
  it("derives id, name, and snippet from a candidate", () => {
    const form = candidateToForm(candidate);
    expect(form.id).toBe("merge-sorted-lists");
    expect(form.name).toBe("merge sorted lists");
    expect(form.snippet).toBe(candidate.excerpt);
  });
});

describe("validation", () => {
  it("requires name and id, so an empty form sends no request", () => {
    const errors = validateDraft(emptyForm());
    expect(errors.name).toBe("name is required");
    expect(errors.id).toBe("id is required");
  });

  it("rejects malformed ids, duplicate variables, unknown dtypes", () => {
    const form = {
      ...emptyForm(),
      id: "Bad Id!",
      name: "ok",
      inputs: [
        { name: "xs", dtype: "list" },
        { name: "xs", dtype: "int" },
        { name: "n", dtype: "float" },
      ],
    };
    const errors = validateDraft(form);
    expect(errors.id).toMatch(/lowercase/);
    expect(errors["inputs.1"]).toBe("duplicate name 'xs'");
    expect(errors["inputs.2"]).toBe("unknown dtype 'float'");
  });

  it("accepts a complete well-formed draft", () => {
    const form = {
      ...emptyForm(),
      id: "merge-sorted-lists",
      name: "merge sorted lists",
      inputs: [{ name: "a", dtype: "list" }, { name: "b", dtype: "list" }],
      outputs: [{ name: "merged", dtype: "list" }],
      snippet: "func merge(a: list, b: list) -> list { return a; }",
    };
    expect(validateDraft(form)).toEqual({});
  });
});

describe("payload", () => {
  it("splits keywords and omits a blank snippet for server-side fetch", () => {
    const form = {
      ...emptyForm(),
      id: "x",
      name: "x",
      keywords: " merge, sort ,,lists ",
      snippet: "   ",
    };
    const payload = draftPayload(form);
    expect(payload.keywords).toEqual(["merge", "sort", "lists"]);
    expect(payload).not.toHaveProperty("snippet");
    expect(payload.kind).toBe("terminal");
  });
});

describe("caret mapping", () => {
  const parseError: ApiErrorPayload = {
    stage: "store",
    code: "snippet-parse",
    message: "snippet of 'zz' does not parse: expected parameter name",
    detail: { id: "zz", line: 2, column: 5 },
  };

  it("reads the caret from a snippet-parse payload only", () => {
    expect(caretPosition(parseError)).toEqual({ line: 2, column: 5 });
    expect(
      caretPosition({ ...parseError, code: "duplicate-id" }),
    ).toBeNull();
  });

  it("converts line/column to a character offset", () => {
    const text = "func f() {\n    let x = ;\n}\n";
    // line 2 column 5 lands on the 'l' of 'let'
    const offset = caretOffset(text, { line: 2, column: 5 });
    expect(text.slice(offset, offset + 3)).toBe("let");
    // past-the-end positions clamp to the text length
    expect(caretOffset("ab", { line: 9, column: 9 })).toBe(2);
  });
});
