"""Regenerate the test fixtures under frontend/tests/fixtures.

Everything the web client's tests compare against comes from the backend
itself: the pipeline graph file as the library serializes it, the code the
CLI generates for it, the matching HTTP response body, and 50 scripted
edit sequences whose connect attempts carry the backend's accept/reject
verdict (duplicate edges follow the same rule the hierarchy link endpoint
applies). Run from the repository root:

    python3 frontend/scripts/make_fixtures.py
"""

import json
import random
import subprocess
import sys
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from conceptforge.demo import build_demo_store
from conceptforge.errors import InvariantViolationError
from conceptforge.graphs import (
    ConceptGraph,
    GraphNode,
    graph_from_payload,
    save_concept_graph,
)
from conceptforge.service import create_app
from conceptforge.store import save_store

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"
SEED = 20260819

PIPELINE = ConceptGraph(
    nodes=(GraphNode("n1", "read-list"), GraphNode("n2", "ascending-sort"),
           GraphNode("n3", "print-list")),
    edges=(("n1", "n2"), ("n2", "n3")))

CONCEPT_POOL = ["read-list", "insertion-sort", "print-list", "identity",
                "reverse-list", "find-max"]


def write_pipeline_fixtures(store_path: Path) -> None:
    graph_path = FIXTURES / "pipeline.cmap.json"
    save_concept_graph(PIPELINE, graph_path)

    out_path = FIXTURES / "pipeline.out.mini"
    subprocess.run(
        [sys.executable, "-m", "conceptforge.cli", "--store", str(store_path),
         "generate", str(graph_path), "--backend", "minilang",
         "-o", str(out_path)],
        check=True, capture_output=True)

    client = TestClient(create_app(store_path))
    response = client.post("/api/generate", json={
        "graph": json.loads(graph_path.read_text()),
        "backend": "minilang"})
    response.raise_for_status()
    body = json.dumps(response.json(), indent=2, ensure_ascii=False) + "\n"
    (FIXTURES / "generate_response.json").write_text(body)


def connect_verdict(nodes, edges, frm, to):
    """Accept/reject exactly as the service would: unknown endpoints and
    cycles via graph payload validation, duplicates via the rule the
    hierarchy link endpoint applies."""
    if frm not in nodes or to not in nodes:
        return "rejected"
    if [frm, to] in edges:
        return "rejected"
    payload = {
        "version": 1,
        "nodes": [{"id": nid, "concept": nodes[nid]} for nid in sorted(nodes)],
        "edges": sorted(edges + [[frm, to]]),
    }
    try:
        graph_from_payload(payload)
    except InvariantViolationError:
        return "rejected"
    return "accepted"


def make_edit_scripts():
    rng = random.Random(SEED)
    scripts = []
    for _ in range(50):
        nodes: dict[str, str] = {}
        edges: list[list[str]] = []
        counter = 0
        ops = []
        for _ in range(rng.randint(10, 18)):
            roll = rng.random()
            if not nodes or (roll < 0.3 and len(nodes) < 8):
                counter += 1
                nid = f"n{counter}"
                concept = rng.choice(CONCEPT_POOL)
                nodes[nid] = concept
                ops.append({"op": "add-node", "id": nid, "concept": concept})
            elif roll < 0.85:
                ids = sorted(nodes)
                frm = rng.choice(ids + ["zz"]) if rng.random() < 0.1 \
                    else rng.choice(ids)
                to = rng.choice(ids)
                verdict = connect_verdict(nodes, edges, frm, to)
                ops.append({"op": "connect", "from": frm, "to": to,
                            "verdict": verdict})
                if verdict == "accepted":
                    edges.append([frm, to])
            else:
                victim = rng.choice(sorted(nodes))
                del nodes[victim]
                edges = [e for e in edges if victim not in e]
                ops.append({"op": "delete", "id": victim})
        scripts.append({
            "ops": ops,
            "final": {"nodes": sorted(nodes), "edges": sorted(edges)},
        })
    body = json.dumps({"version": 1, "seed": SEED, "scripts": scripts},
                      indent=2) + "\n"
    (FIXTURES / "edit_scripts.json").write_text(body)


def main() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        store_path = Path(tmp) / "store.cmdb.json"
        save_store(build_demo_store(), store_path)
        write_pipeline_fixtures(store_path)
    make_edit_scripts()
    print(f"fixtures written to {FIXTURES}")


if __name__ == "__main__":
    main()
