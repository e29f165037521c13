"""Precedence graphs over concept references.

The same shape serves two roles: the part-graph stored inside a complex
concept, and the user-authored graph handed to the synthesis pipeline.
Nodes reference concepts by id; edges state execution precedence.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

from .errors import FormatError, InvariantViolationError, IoError


@dataclass(frozen=True)
class GraphNode:
    node_id: str
    concept: str
    # explicit input bindings: (input name, "source_node.output_name")
    bindings: tuple[tuple[str, str], ...] = ()

    def binding_for(self, input_name: str) -> str | None:
        for name, source in self.bindings:
            if name == input_name:
                return source
        return None


@dataclass(frozen=True)
class ConceptGraph:
    nodes: tuple[GraphNode, ...] = ()
    edges: tuple[tuple[str, str], ...] = ()

    def node_ids(self) -> list[str]:
        return [n.node_id for n in self.nodes]

    def node(self, node_id: str) -> GraphNode:
        for n in self.nodes:
            if n.node_id == node_id:
                return n
        raise KeyError(node_id)

    def predecessors(self, node_id: str) -> list[str]:
        return [a for a, b in self.edges if b == node_id]

    def successors(self, node_id: str) -> list[str]:
        return [b for a, b in self.edges if a == node_id]

    def sources(self) -> list[str]:
        incoming = {b for _, b in self.edges}
        return [n.node_id for n in self.nodes if n.node_id not in incoming]

    def sinks(self) -> list[str]:
        outgoing = {a for a, _ in self.edges}
        return [n.node_id for n in self.nodes if n.node_id not in outgoing]

    def topo_order(self) -> list[str]:
        """Kahn's algorithm; the ready set is drained in node-id order."""
        indegree = {n.node_id: 0 for n in self.nodes}
        for _, b in self.edges:
            indegree[b] += 1
        ready = sorted(nid for nid, deg in indegree.items() if deg == 0)
        order: list[str] = []
        while ready:
            nid = ready.pop(0)
            order.append(nid)
            for succ in sorted(self.successors(nid)):
                indegree[succ] -= 1
                if indegree[succ] == 0:
                    ready.append(succ)
            ready.sort()
        if len(order) != len(self.nodes):
            stuck = sorted(set(indegree) - set(order))
            raise InvariantViolationError(
                "precedence graph contains a cycle", nodes=stuck)
        return order

    def validate(self) -> None:
        ids = self.node_ids()
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise InvariantViolationError(
                f"duplicate node ids: {', '.join(dupes)}", nodes=dupes)
        known = set(ids)
        for a, b in self.edges:
            if a not in known or b not in known:
                raise InvariantViolationError(
                    f"edge ({a}, {b}) references a missing node", edge=[a, b])
        self.topo_order()
        if self.nodes and (not self.sources() or not self.sinks()):
            # unreachable while acyclic and nonempty; kept as a guard
            raise InvariantViolationError("graph needs a source and a sink")


def graph_to_payload(graph: ConceptGraph) -> dict[str, Any]:
    nodes = []
    for n in sorted(graph.nodes, key=lambda n: n.node_id):
        entry: dict[str, Any] = {"id": n.node_id, "concept": n.concept}
        if n.bindings:
            entry["bindings"] = {name: src for name, src in sorted(n.bindings)}
        nodes.append(entry)
    return {"nodes": nodes, "edges": [list(e) for e in sorted(graph.edges)]}


def graph_from_payload(payload: Any) -> ConceptGraph:
    if not isinstance(payload, dict):
        raise InvariantViolationError("graph payload must be an object")
    nodes = []
    for raw in payload.get("nodes", []):
        if not isinstance(raw, dict) or "id" not in raw or "concept" not in raw:
            raise InvariantViolationError(
                "graph node needs 'id' and 'concept' fields", node=raw)
        bindings = tuple(sorted(
            (str(k), str(v)) for k, v in raw.get("bindings", {}).items()))
        nodes.append(GraphNode(node_id=str(raw["id"]),
                               concept=str(raw["concept"]),
                               bindings=bindings))
    edges = tuple(sorted((str(a), str(b)) for a, b in payload.get("edges", [])))
    graph = ConceptGraph(nodes=tuple(sorted(nodes, key=lambda n: n.node_id)),
                         edges=edges)
    graph.validate()
    return graph


def load_concept_graph(path: str) -> ConceptGraph:
    """Read a user-authored precedence graph from a .cmap.json file."""
    try:
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
    except OSError as exc:
        raise IoError(f"cannot read graph file {path!r}", path=path,
                      cause=str(exc)) from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON in graph file {path!r}: {exc}",
                          path=path, line=exc.lineno) from exc
    version = payload.get("version")
    if version != 1:
        raise InvariantViolationError(
            f"unsupported graph file version: {version!r}", version=version)
    return graph_from_payload(payload)


def save_concept_graph(graph: ConceptGraph, path: str) -> None:
    payload = {"version": 1, **graph_to_payload(graph)}
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, ensure_ascii=False)
            fh.write("\n")
    except OSError as exc:
        raise IoError(f"cannot write graph file {path!r}", path=path,
                      cause=str(exc)) from exc
