"""HTTP service over the engine.

Every response body is JSON. Failures arrive as {stage, code, message,
detail} with a status chosen by error code and pipeline stage, so
clients can branch on stable tokens instead of prose. Mutations are
serialized behind one lock and written to disk before the response
goes out.
"""

from __future__ import annotations

import threading
from pathlib import Path

from fastapi import Body, FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .errors import ForgeError, InvariantViolationError
from .graphs import graph_from_payload
from .harvester import (
    SnippetCandidate,
    build_query,
    default_providers,
    import_candidate,
    search_provider,
)
from .pdg import cluster_snippets
from .report import cluster_report_payload
from .store import (
    add_concept,
    concept_from_payload,
    concept_to_payload,
    link_specialization,
    load_store,
    save_store,
    search_concepts,
)
from .synthesis import synthesize

# codes with a fixed status regardless of stage
_CODE_STATUS = {
    "unknown-id": 404,
    "duplicate-id": 409,
    "duplicate-edge": 409,
    "cycle-rejected": 409,
    "aggregation-cycle": 409,
    "empty-query": 400,
    "provider-unreachable": 502,
    "rate-limited": 502,
    "auth-missing": 502,
    "fetch-failed": 502,
}

# fallback by pipeline stage: user input problems are 400, synthesis
# pipeline failures 422, provider trouble 502
_STAGE_STATUS = {
    "store": 400,
    "parse": 400,
    "cluster": 400,
    "resolve": 422,
    "expand": 422,
    "harmonize": 422,
    "emit": 422,
    "evaluate": 422,
    "harvest": 502,
}


def _status_for(err: ForgeError) -> int:
    if err.code in _CODE_STATUS:
        return _CODE_STATUS[err.code]
    return _STAGE_STATUS.get(err.stage, 400)


def _require(payload: dict, key: str):
    if not isinstance(payload, dict) or key not in payload:
        raise InvariantViolationError(f"request body needs {key!r}",
                                      stage="store", field=key)
    return payload[key]


def create_app(store_path: str | Path, providers: dict | None = None,
               fetch=None) -> FastAPI:
    """Service bound to one store file. `providers` and `fetch` exist for
    dependency injection; defaults reach the bundled local corpus."""
    app = FastAPI(title="concept composition service")
    # the web client is served separately during development
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])
    app.state.store_path = str(store_path)
    app.state.store = load_store(str(store_path))
    app.state.providers = default_providers() if providers is None else providers
    app.state.fetch = fetch
    app.state.lock = threading.Lock()

    @app.exception_handler(ForgeError)
    async def forge_error_handler(request: Request, err: ForgeError):
        return JSONResponse(status_code=_status_for(err),
                            content=err.to_payload())

    def _mutate(make_store):
        # single writer: mutate, persist, and only then expose the change
        with app.state.lock:
            store = make_store(app.state.store)
            save_store(store, app.state.store_path)
            app.state.store = store
            return store

    @app.get("/api/concepts")
    def list_concepts(q: str | None = None):
        store = app.state.store
        if q is not None:
            return [{"id": cid, "score": score}
                    for cid, score in search_concepts(store, q)]
        return [concept_to_payload(store.concepts[cid])
                for cid in sorted(store.concepts)]

    @app.post("/api/concepts")
    def create_concept(payload: dict = Body(...)):
        concept = concept_from_payload(payload)
        _mutate(lambda store: add_concept(store, concept))
        return {"added": concept.id}

    @app.get("/api/hierarchy")
    def hierarchy():
        store = app.state.store
        return {
            "concepts": [{"id": cid,
                          "name": store.concepts[cid].name,
                          "kind": store.concepts[cid].kind}
                         for cid in sorted(store.concepts)],
            "isa": sorted([child, parent] for child, parent
                          in store.hierarchy.isa_edges),
        }

    @app.post("/api/hierarchy/link")
    def link(payload: dict = Body(...)):
        child = _require(payload, "child")
        parent = _require(payload, "parent")
        _mutate(lambda store: link_specialization(store, child, parent))
        return {"linked": [child, parent]}

    @app.post("/api/generate")
    def generate(payload: dict = Body(...)):
        graph = graph_from_payload(_require(payload, "graph"))
        backend = payload.get("backend", "minilang")
        program = synthesize(app.state.store, graph, backend)
        return {"backend": program.backend, "source": program.source,
                "provenance": program.provenance_map()}

    @app.post("/api/cluster")
    def cluster(payload: dict = Body(...)):
        threshold = float(_require(payload, "threshold"))
        rounds = int(payload.get("rounds", 3))
        label_ops = bool(payload.get("label_ops", False))
        result = cluster_snippets(app.state.store, threshold=threshold,
                                  rounds=rounds, label_ops=label_ops)
        return cluster_report_payload(result, threshold, rounds)

    @app.get("/api/search")
    def search(q: str, provider: str = "local"):
        configs = app.state.providers
        if provider not in configs:
            known = ", ".join(sorted(configs)) or "none"
            raise InvariantViolationError(
                f"unknown provider {provider!r} (configured: {known})",
                stage="store", provider=provider)
        keywords = build_query(q)
        candidates = search_provider(configs[provider], keywords,
                                     fetch=app.state.fetch)
        return {
            "keywords": keywords,
            "candidates": [{
                "provider": c.provider, "locator": c.locator,
                "title": c.title, "excerpt": c.excerpt, "score": c.score,
                "fetched_at": c.fetched_at,
            } for c in candidates],
        }

    @app.post("/api/import")
    def import_snippet(payload: dict = Body(...)):
        raw = _require(payload, "candidate")
        if not isinstance(raw, dict):
            raise InvariantViolationError("candidate must be an object",
                                          stage="store", field="candidate")
        for key in ("provider", "locator", "title", "excerpt", "score"):
            if key not in raw:
                raise InvariantViolationError(
                    f"candidate needs {key!r}", stage="store", field=key)
        candidate = SnippetCandidate(
            provider=str(raw["provider"]), locator=str(raw["locator"]),
            title=str(raw["title"]), excerpt=str(raw["excerpt"]),
            score=float(raw["score"]),
            fetched_at=str(raw.get("fetched_at", "")))
        draft = concept_from_payload(_require(payload, "draft"))
        _mutate(lambda store: import_candidate(store, candidate, draft))
        return {"added": draft.id}

    return app
