"""Concept database: annotated snippets in a specialization hierarchy.

A store is an immutable snapshot; every mutation returns a new store.
Concepts come in three kinds: ``terminal`` (backed by one snippet
function), ``complex`` (an aggregation of other concepts with precedence
edges), and ``abstract`` (an annotated placeholder with no implementation
yet, waiting for a specialization that has one).

Persistence is a single flat JSON file (extension ``.cmdb.json``) with
deterministic key order, so diffs and byte-level comparisons are stable.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from typing import Any, Iterator

from . import minilang
from .errors import (
    AggregationCycleError,
    BrokenPartReferenceError,
    CycleRejectedError,
    DuplicateEdgeError,
    DuplicateIdError,
    FormatError,
    InvariantViolationError,
    IoError,
    MiniParseError,
    SnippetParseError,
    UnknownIdError,
)
from .graphs import ConceptGraph, graph_from_payload, graph_to_payload

CONCEPT_ID_RE = re.compile(r"[a-z0-9][a-z0-9-]*\Z")
KINDS = ("terminal", "complex", "abstract")
STORE_VERSION = 1

_TOKEN_RE = re.compile(r"[a-z0-9]+")


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


@dataclass(frozen=True)
class TypedVar:
    name: str
    dtype: str
    description: str = ""


@dataclass(frozen=True)
class Curation:
    author: str = ""
    created: str = ""
    notes: str = ""


@dataclass(frozen=True)
class Annotation:
    inputs: tuple[TypedVar, ...] = ()
    outputs: tuple[TypedVar, ...] = ()
    keywords: frozenset[str] = frozenset()
    curation: Curation = Curation()


@dataclass(frozen=True)
class Concept:
    id: str
    name: str
    description: str = ""
    kind: str = "terminal"
    annotation: Annotation = Annotation()
    snippet: str | None = None
    parts: ConceptGraph | None = None

    @property
    def implemented(self) -> bool:
        return self.kind in ("terminal", "complex")


@dataclass(frozen=True)
class Hierarchy:
    # (child, parent): child is a specialization of parent
    isa_edges: frozenset[tuple[str, str]] = frozenset()

    def parents(self, concept_id: str) -> list[str]:
        return sorted(p for c, p in self.isa_edges if c == concept_id)

    def children(self, concept_id: str) -> list[str]:
        return sorted(c for c, p in self.isa_edges if p == concept_id)


@dataclass(frozen=True)
class Store:
    concepts: dict[str, Concept] = field(default_factory=dict)
    hierarchy: Hierarchy = Hierarchy()
    version: int = STORE_VERSION

    def concept(self, concept_id: str) -> Concept:
        found = self.concepts.get(concept_id)
        if found is None:
            raise UnknownIdError(f"unknown concept id {concept_id!r}",
                                 id=concept_id)
        return found

    def terminal_concepts(self) -> Iterator[Concept]:
        for cid in sorted(self.concepts):
            if self.concepts[cid].kind == "terminal":
                yield self.concepts[cid]


# -- validation --------------------------------------------------------------

def _parse_snippet(concept: Concept) -> minilang.ast.FuncDef:
    try:
        program = minilang.parse(concept.snippet or "")
    except MiniParseError as err:
        raise SnippetParseError(
            f"snippet of {concept.id!r} does not parse: {err.message}",
            id=concept.id, **err.detail,
        ) from err
    if len(program.functions) != 1:
        raise SnippetParseError(
            f"snippet of {concept.id!r} must define exactly one function, "
            f"found {len(program.functions)}",
            id=concept.id, line=1, column=1)
    return program.functions[0]


def _validate_concept(concept: Concept) -> None:
    if not CONCEPT_ID_RE.match(concept.id):
        raise InvariantViolationError(
            f"concept id {concept.id!r} is not lowercase kebab-case",
            id=concept.id)
    if concept.kind not in KINDS:
        raise InvariantViolationError(
            f"concept {concept.id!r} has unknown kind {concept.kind!r}",
            id=concept.id, kind=concept.kind)
    if not concept.name:
        raise InvariantViolationError(
            f"concept {concept.id!r} needs a display name", id=concept.id)
    ann = concept.annotation
    for group_name, group in (("input", ann.inputs), ("output", ann.outputs)):
        names = [v.name for v in group]
        if len(set(names)) != len(names):
            raise InvariantViolationError(
                f"concept {concept.id!r} has duplicate {group_name} names",
                id=concept.id)
        for var in group:
            if var.dtype not in minilang.ast.DTYPES:
                raise InvariantViolationError(
                    f"concept {concept.id!r} {group_name} {var.name!r} has "
                    f"unknown dtype {var.dtype!r}", id=concept.id)
            if not re.match(r"[A-Za-z_][A-Za-z0-9_]*\Z", var.name):
                raise InvariantViolationError(
                    f"concept {concept.id!r} {group_name} name {var.name!r} "
                    "is not a valid identifier", id=concept.id)
    if len(ann.outputs) > 1:
        raise InvariantViolationError(
            f"concept {concept.id!r} declares more than one output",
            id=concept.id)

    if concept.kind == "terminal":
        if concept.snippet is None or concept.parts is not None:
            raise InvariantViolationError(
                f"terminal concept {concept.id!r} needs a snippet and no parts",
                id=concept.id)
        func = _parse_snippet(concept)
        declared = [(v.name, v.dtype) for v in ann.inputs]
        actual = [(p.name, p.dtype) for p in func.params]
        if len(declared) != len(actual) or any(
                d[1] != a[1] for d, a in zip(declared, actual)):
            raise InvariantViolationError(
                f"snippet parameters of {concept.id!r} do not match the "
                f"annotated inputs: {actual} vs {declared}", id=concept.id)
        has_return_value = func.return_dtype is not None
        if has_return_value != bool(ann.outputs):
            raise InvariantViolationError(
                f"snippet of {concept.id!r} "
                f"{'returns a value' if has_return_value else 'returns nothing'}"
                f" but the annotation declares {len(ann.outputs)} output(s)",
                id=concept.id)
        if ann.outputs and ann.outputs[0].dtype != func.return_dtype:
            raise InvariantViolationError(
                f"snippet of {concept.id!r} returns {func.return_dtype} but "
                f"the annotated output is {ann.outputs[0].dtype}",
                id=concept.id)
    elif concept.kind == "complex":
        if concept.parts is None or concept.snippet is not None:
            raise InvariantViolationError(
                f"complex concept {concept.id!r} needs parts and no snippet",
                id=concept.id)
        if not concept.parts.nodes:
            raise InvariantViolationError(
                f"complex concept {concept.id!r} has an empty part-graph",
                id=concept.id)
        concept.parts.validate()
    else:
        if concept.snippet is not None or concept.parts is not None:
            raise InvariantViolationError(
                f"abstract concept {concept.id!r} must carry neither snippet "
                "nor parts", id=concept.id)


def _part_refs(concept: Concept) -> list[str]:
    if concept.parts is None:
        return []
    return sorted({n.concept for n in concept.parts.nodes})


def _check_aggregation_acyclic(concepts: dict[str, Concept],
                               start: str) -> None:
    """DFS from `start` through part references; a path back to `start`
    means expanding it would never terminate."""
    path: list[str] = []

    def visit(cid: str) -> None:
        path.append(cid)
        concept = concepts.get(cid)
        if concept is not None:
            for ref in _part_refs(concept):
                if ref == start:
                    raise AggregationCycleError(
                        f"part-graph of {start!r} contains itself",
                        path=path + [start])
                if ref not in path:
                    visit(ref)
        path.pop()

    visit(start)


def _isa_cycle(edges: frozenset[tuple[str, str]], child: str,
               parent: str) -> list[str] | None:
    """Path parent -> ... -> child through existing isa edges, if any."""
    outgoing: dict[str, list[str]] = {}
    for c, p in edges:
        outgoing.setdefault(c, []).append(p)
    stack = [(parent, [parent])]
    seen = set()
    while stack:
        current, path = stack.pop()
        if current == child:
            return path
        if current in seen:
            continue
        seen.add(current)
        for nxt in sorted(outgoing.get(current, []), reverse=True):
            stack.append((nxt, path + [nxt]))
    return None


def _validate_store(store: Store) -> None:
    for concept in store.concepts.values():
        _validate_concept(concept)
        for ref in _part_refs(concept):
            if ref not in store.concepts:
                raise InvariantViolationError(
                    f"part-graph of {concept.id!r} references unknown "
                    f"concept {ref!r}", id=concept.id, missing=ref)
    for cid in store.concepts:
        _check_aggregation_acyclic(store.concepts, cid)
    for child, parent in sorted(store.hierarchy.isa_edges):
        for endpoint in (child, parent):
            if endpoint not in store.concepts:
                raise InvariantViolationError(
                    f"isa edge ({child}, {parent}) references unknown "
                    f"concept {endpoint!r}", missing=endpoint)
        if child == parent:
            raise InvariantViolationError(
                f"isa edge ({child}, {parent}) is a self-loop",
                path=[child, parent])
    for child, parent in sorted(store.hierarchy.isa_edges):
        cycle = _isa_cycle(store.hierarchy.isa_edges - {(child, parent)},
                           child, parent)
        if cycle is not None:
            raise InvariantViolationError(
                "isa edges contain a cycle", path=cycle + [parent])


# -- mutations ---------------------------------------------------------------

def add_concept(store: Store, concept: Concept) -> Store:
    """New store with `concept` added; raises rather than guessing on any
    malformed input."""
    if concept.id in store.concepts:
        raise DuplicateIdError(f"concept id {concept.id!r} already exists",
                               id=concept.id)
    _validate_concept(concept)
    for ref in _part_refs(concept):
        if ref != concept.id and ref not in store.concepts:
            raise BrokenPartReferenceError(
                f"part-graph of {concept.id!r} references unknown concept "
                f"{ref!r}", id=concept.id, missing=ref)
    merged = dict(store.concepts)
    merged[concept.id] = concept
    if concept.kind == "complex":
        _check_aggregation_acyclic(merged, concept.id)
    ordered = {cid: merged[cid] for cid in sorted(merged)}
    return replace(store, concepts=ordered)


def link_specialization(store: Store, child: str, parent: str) -> Store:
    """New store with the isa edge child -> parent; the hierarchy stays a DAG."""
    for endpoint in (child, parent):
        if endpoint not in store.concepts:
            raise UnknownIdError(f"unknown concept id {endpoint!r}",
                                 id=endpoint)
    edge = (child, parent)
    if edge in store.hierarchy.isa_edges:
        raise DuplicateEdgeError(
            f"isa edge {child!r} -> {parent!r} already exists",
            child=child, parent=parent)
    if child == parent:
        raise CycleRejectedError(
            f"cannot make {child!r} a specialization of itself",
            path=[child, parent])
    cycle = _isa_cycle(store.hierarchy.isa_edges, child, parent)
    if cycle is not None:
        raise CycleRejectedError(
            f"edge {child!r} -> {parent!r} would close a cycle",
            path=cycle + [parent])
    hierarchy = Hierarchy(isa_edges=store.hierarchy.isa_edges | {edge})
    return replace(store, hierarchy=hierarchy)


# -- search ------------------------------------------------------------------

def search_concepts(store: Store, query: str) -> list[tuple[str, float]]:
    """Keyword ranking: score = how many distinct query tokens appear in a
    concept's name, keywords, or description. Ties order by id."""
    query_tokens = []
    for token in tokenize(query):
        if token not in query_tokens:
            query_tokens.append(token)
    if not query_tokens:
        return []
    results = []
    for cid in sorted(store.concepts):
        concept = store.concepts[cid]
        haystack = set(tokenize(concept.name))
        haystack.update(tokenize(concept.description))
        for keyword in concept.annotation.keywords:
            haystack.update(tokenize(keyword))
        score = float(sum(1 for token in query_tokens if token in haystack))
        if score > 0:
            results.append((cid, score))
    results.sort(key=lambda pair: (-pair[1], pair[0]))
    return results


# -- persistence -------------------------------------------------------------

def _typed_var_payload(var: TypedVar) -> dict[str, str]:
    return {"name": var.name, "dtype": var.dtype, "description": var.description}


def concept_to_payload(concept: Concept) -> dict[str, Any]:
    ann = concept.annotation
    payload: dict[str, Any] = {
        "id": concept.id,
        "name": concept.name,
        "description": concept.description,
        "kind": concept.kind,
        "inputs": [_typed_var_payload(v) for v in ann.inputs],
        "outputs": [_typed_var_payload(v) for v in ann.outputs],
        "keywords": sorted(ann.keywords),
        "curation": {
            "author": ann.curation.author,
            "created": ann.curation.created,
            "notes": ann.curation.notes,
        },
    }
    if concept.snippet is not None:
        payload["snippet"] = concept.snippet
    if concept.parts is not None:
        payload["parts"] = graph_to_payload(concept.parts)
    return payload


def store_to_payload(store: Store) -> dict[str, Any]:
    return {
        "version": store.version,
        "concepts": [concept_to_payload(store.concepts[cid])
                     for cid in sorted(store.concepts)],
        "isa": [list(edge) for edge in sorted(store.hierarchy.isa_edges)],
    }


def save_store(store: Store, path: str) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(store_to_payload(store), fh, indent=2, ensure_ascii=False)
            fh.write("\n")
    except OSError as err:
        raise IoError(f"cannot write store file {path!r}: {err}",
                      path=path) from err


def _typed_var_from(raw: Any, concept_id: str) -> TypedVar:
    if not isinstance(raw, dict) or "name" not in raw or "dtype" not in raw:
        raise FormatError(
            f"concept {concept_id!r}: variable entries need name and dtype",
            id=concept_id)
    return TypedVar(name=str(raw["name"]), dtype=str(raw["dtype"]),
                    description=str(raw.get("description", "")))


def concept_from_payload(raw: Any) -> Concept:
    if not isinstance(raw, dict) or "id" not in raw:
        raise FormatError("concept entries need at least an 'id' field")
    cid = str(raw["id"])
    curation_raw = raw.get("curation", {})
    if not isinstance(curation_raw, dict):
        raise FormatError(f"concept {cid!r}: curation must be an object", id=cid)
    parts = None
    if "parts" in raw:
        parts = graph_from_payload(raw["parts"])
    return Concept(
        id=cid,
        name=str(raw.get("name", "")),
        description=str(raw.get("description", "")),
        kind=str(raw.get("kind", "terminal")),
        annotation=Annotation(
            inputs=tuple(_typed_var_from(v, cid) for v in raw.get("inputs", [])),
            outputs=tuple(_typed_var_from(v, cid) for v in raw.get("outputs", [])),
            keywords=frozenset(str(k) for k in raw.get("keywords", [])),
            curation=Curation(
                author=str(curation_raw.get("author", "")),
                created=str(curation_raw.get("created", "")),
                notes=str(curation_raw.get("notes", "")),
            ),
        ),
        snippet=str(raw["snippet"]) if "snippet" in raw else None,
        parts=parts,
    )


def store_from_payload(payload: Any) -> Store:
    if not isinstance(payload, dict):
        raise FormatError("store file must hold a JSON object")
    version = payload.get("version")
    if version != STORE_VERSION:
        raise FormatError(f"unsupported store version: {version!r}",
                          version=version)
    concepts: dict[str, Concept] = {}
    for raw in payload.get("concepts", []):
        concept = concept_from_payload(raw)
        if concept.id in concepts:
            raise FormatError(f"concept id {concept.id!r} appears twice",
                              id=concept.id)
        concepts[concept.id] = concept
    isa = set()
    for raw_edge in payload.get("isa", []):
        if not isinstance(raw_edge, (list, tuple)) or len(raw_edge) != 2:
            raise FormatError(f"malformed isa edge: {raw_edge!r}")
        isa.add((str(raw_edge[0]), str(raw_edge[1])))
    store = Store(concepts={cid: concepts[cid] for cid in sorted(concepts)},
                  hierarchy=Hierarchy(isa_edges=frozenset(isa)),
                  version=STORE_VERSION)
    _validate_store(store)
    return store


def load_store(path: str) -> Store:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as err:
        raise IoError(f"cannot read store file {path!r}: {err}",
                      path=path) from err
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as err:
        raise FormatError(f"store file is not valid JSON: {err.msg}",
                          line=err.lineno, column=err.colno) from err
    return store_from_payload(payload)


def empty_store() -> Store:
    return Store()
