/**
 * Typed client for the concept composition HTTP service.
 *
 * Every failure path is one of two errors: OfflineError when the service
 * cannot be reached at all, ServiceError when it answered with the
 * structured {stage, code, message, detail} payload.
 */

import type { ConceptGraphPayload } from "./graph.js";

export interface ApiErrorPayload {
  stage: string | null;
  code: string;
  message: string;
  detail: Record<string, unknown>;
}

export class ServiceError extends Error {
  constructor(readonly status: number, readonly payload: ApiErrorPayload) {
    super(payload.message);
    this.name = "ServiceError";
  }
}

export class OfflineError extends Error {
  constructor(cause: unknown) {
    super("service unreachable");
    this.name = "OfflineError";
    this.cause = cause;
  }
}

export interface TypedVarView {
  name: string;
  dtype: string;
  description: string;
}

export interface ConceptView {
  id: string;
  name: string;
  description: string;
  kind: "terminal" | "complex" | "abstract";
  inputs: TypedVarView[];
  outputs: TypedVarView[];
  keywords: string[];
  curation: { author: string; created: string; notes: string };
  snippet?: string;
  parts?: unknown;
}

export interface SearchHit {
  id: string;
  score: number;
}

export interface HierarchyView {
  concepts: { id: string; name: string; kind: string }[];
  isa: [string, string][];
}

export interface GenerateResult {
  backend: string;
  source: string;
  // node id -> [first line, last line] in source, 1-indexed inclusive
  provenance: Record<string, [number, number]>;
}

export interface ClusterResult {
  threshold: number;
  rounds: number;
  ids: string[];
  clusters: string[][];
  suggestions: string[];
  matrix: number[][];
}

export interface Candidate {
  provider: string;
  locator: string;
  title: string;
  excerpt: string;
  score: number;
  fetched_at: string;
}

export interface HarvestResult {
  keywords: string[];
  candidates: Candidate[];
}

export class ApiClient {
  constructor(
    private readonly base: string = "",
    private readonly fetchImpl: typeof fetch = (...args) => fetch(...args),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchImpl(this.base + path, init);
    } catch (err) {
      // a superseded generate call aborts; let the caller recognize it
      if (err instanceof DOMException && err.name === "AbortError") throw err;
      throw new OfflineError(err);
    }
    if (!response.ok) {
      let payload: ApiErrorPayload;
      try {
        payload = (await response.json()) as ApiErrorPayload;
      } catch {
        payload = {
          stage: null,
          code: `http-${response.status}`,
          message: response.statusText,
          detail: {},
        };
      }
      throw new ServiceError(response.status, payload);
    }
    return (await response.json()) as T;
  }

  private post<T>(path: string, body: unknown, signal?: AbortSignal): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
      signal,
    });
  }

  listConcepts(): Promise<ConceptView[]> {
    return this.request("/api/concepts");
  }

  searchConcepts(query: string): Promise<SearchHit[]> {
    return this.request(`/api/concepts?q=${encodeURIComponent(query)}`);
  }

  addConcept(payload: unknown): Promise<{ added: string }> {
    return this.post("/api/concepts", payload);
  }

  hierarchy(): Promise<HierarchyView> {
    return this.request("/api/hierarchy");
  }

  link(child: string, parent: string): Promise<{ linked: [string, string] }> {
    return this.post("/api/hierarchy/link", { child, parent });
  }

  generate(
    graph: ConceptGraphPayload,
    backend: string,
    signal?: AbortSignal,
  ): Promise<GenerateResult> {
    return this.post("/api/generate", { graph, backend }, signal);
  }

  cluster(opts: { threshold?: number; rounds?: number; label_ops?: boolean }): Promise<ClusterResult> {
    return this.post("/api/cluster", opts);
  }

  harvest(query: string, provider = "local"): Promise<HarvestResult> {
    const q = encodeURIComponent(query);
    const p = encodeURIComponent(provider);
    return this.request(`/api/search?q=${q}&provider=${p}`);
  }

  importCandidate(candidate: Candidate, draft: unknown): Promise<{ added: string }> {
    return this.post("/api/import", { candidate, draft });
  }
}
