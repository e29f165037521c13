import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import type { ApiErrorPayload, GenerateResult } from "../src/api.js";
import {
  linesForNode,
  nodeForLine,
  panelText,
  renderCodePanel,
  renderErrorCard,
} from "../src/codePanel.js";
import { unescapeHtml } from "../src/html.js";

const fixture = (name: string): string =>
  readFileSync(new URL(`./fixtures/${name}`, import.meta.url), "utf8");

const response = JSON.parse(fixture("generate_response.json")) as GenerateResult;

describe("code panel parity", () => {
  it("shows exactly what the CLI writes for the same graph", () => {
    expect(panelText(response)).toBe(fixture("pipeline.out.mini"));
  });

  it("renders rows that reassemble into the source byte-for-byte", () => {
    const html = renderCodePanel(response);
    const codes = [...html.matchAll(/<code>(.*?)<\/code>/gs)].map((m) =>
      unescapeHtml(m[1]!),
    );
    expect(codes.join("\n") + "\n").toBe(response.source);
  });
});

describe("provenance mapping", () => {
  it("maps nodes to line ranges and back", () => {
    for (const [nodeId, [start, end]] of Object.entries(response.provenance)) {
      expect(linesForNode(response, nodeId)).toEqual([start, end]);
      expect(nodeForLine(response, start)).toBe(nodeId);
      expect(nodeForLine(response, end)).toBe(nodeId);
    }
    expect(linesForNode(response, "no-such-node")).toBeNull();
    expect(nodeForLine(response, 1)).toBeNull(); // function bodies have no owner
  });

  it("tags owned lines with their node for hover highlighting", () => {
    const html = renderCodePanel(response);
    for (const [nodeId, [start]] of Object.entries(response.provenance)) {
      const row = new RegExp(
        `data-line="${start}" data-node="${nodeId}"`,
      );
      expect(html).toMatch(row);
    }
  });
});

describe("error cards", () => {
  const ambiguous: ApiErrorPayload = {
    stage: "harmonize",
    code: "ambiguous-binding",
    message: "input 'xs' of 'c' matches 2 outputs equally well",
    detail: {
      node: "c",
      input: "xs",
      level: "exact name",
      candidates: [
        { node: "a", output: "xs", dtype: "list" },
        { node: "b", output: "xs", dtype: "list" },
      ],
    },
  };

  it("offers a one-click fix per ambiguous candidate", () => {
    const html = renderErrorCard(ambiguous);
    expect(html).toContain(`data-code="ambiguous-binding"`);
    expect(html).toContain("harmonize");
    const fixes = [...html.matchAll(/class="fix-binding"/g)];
    expect(fixes.length).toBe(2);
    expect(html).toContain(`data-node="c" data-input="xs" data-source="a.xs"`);
    expect(html).toContain(`data-node="c" data-input="xs" data-source="b.xs"`);
  });

  it("lists upstream outputs for an unbound input, without fix buttons", () => {
    const unbound: ApiErrorPayload = {
      stage: "harmonize",
      code: "unbound-input",
      message: "no upstream output matches input 'xs' of 'b'",
      detail: {
        node: "b",
        input: "xs",
        candidates: [{ node: "a", output: "total", dtype: "int" }],
      },
    };
    const html = renderErrorCard(unbound);
    expect(html).toContain("a.total");
    expect(html).not.toContain("fix-binding");
  });

  it("escapes untrusted text in messages", () => {
    const nasty: ApiErrorPayload = {
      stage: "store",
      code: "invariant-violation",
      message: `<script>alert("x")</script>`,
      detail: {},
    };
    const html = renderErrorCard(nasty);
    expect(html).not.toContain("<script>");
    expect(html).toContain("&lt;script&gt;");
  });
});
