import { describe, expect, it } from "vitest";

import {
  ApiClient,
  OfflineError,
  ServiceError,
  type ApiErrorPayload,
} from "../src/api.js";

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

interface Recorded {
  url: string;
  init?: RequestInit;
}

function clientWith(
  responder: (url: string, init?: RequestInit) => Response | Promise<Response>,
  calls: Recorded[] = [],
): ApiClient {
  const fetchImpl = (async (input: RequestInfo | URL, init?: RequestInit) => {
    const url = typeof input === "string" ? input : input.toString();
    calls.push({ url, init });
    return responder(url, init);
  }) as typeof fetch;
  return new ApiClient("", fetchImpl);
}

describe("request shaping", () => {
  it("encodes query parameters for concept search", async () => {
    const calls: Recorded[] = [];
    const client = clientWith(() => jsonResponse(200, []), calls);
    await client.searchConcepts("sort a list & more");
    expect(calls[0]!.url).toBe("/api/concepts?q=sort%20a%20list%20%26%20more");
  });

  it("posts the graph payload and backend to generate", async () => {
    const calls: Recorded[] = [];
    const client = clientWith(
      () => jsonResponse(200, { backend: "minilang", source: "", provenance: {} }),
      calls,
    );
    const graph = { version: 1 as const, nodes: [], edges: [] };
    await client.generate(graph, "c-like");
    expect(calls[0]!.url).toBe("/api/generate");
    expect(calls[0]!.init?.method).toBe("POST");
    expect(JSON.parse(calls[0]!.init?.body as string)).toEqual({
      graph,
      backend: "c-like",
    });
  });
});

describe("error shaping", () => {
  it("wraps structured service errors with status and payload", async () => {
    const payload: ApiErrorPayload = {
      stage: "resolve",
      code: "unknown-id",
      message: "no concept 'zz'",
      detail: { id: "zz" },
    };
    const client = clientWith(() => jsonResponse(404, payload));
    const failure = await client.hierarchy().catch((err) => err);
    expect(failure).toBeInstanceOf(ServiceError);
    expect((failure as ServiceError).status).toBe(404);
    expect((failure as ServiceError).payload).toEqual(payload);
  });

  it("synthesizes a payload when the body is not JSON", async () => {
    const client = clientWith(
      () => new Response("boom", { status: 500, statusText: "Internal" }),
    );
    const failure = await client.hierarchy().catch((err) => err);
    expect(failure).toBeInstanceOf(ServiceError);
    expect((failure as ServiceError).payload.code).toBe("http-500");
  });

  it("reports unreachable services as OfflineError", async () => {
    const client = clientWith(() => {
      throw new TypeError("fetch failed");
    });
    const failure = await client.listConcepts().catch((err) => err);
    expect(failure).toBeInstanceOf(OfflineError);
  });

  it("lets aborts pass through for superseded generates", async () => {
    const client = clientWith(() => {
      throw new DOMException("The operation was aborted.", "AbortError");
    });
    const graph = { version: 1 as const, nodes: [], edges: [] };
    const failure = await client.generate(graph, "minilang").catch((err) => err);
    expect(failure).toBeInstanceOf(DOMException);
    expect((failure as DOMException).name).toBe("AbortError");
  });
});
