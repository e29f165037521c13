"""Concept store: mutations, search, persistence."""

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conceptforge.corpus_data import load_snippet
from conceptforge.demo import build_demo_store
from conceptforge.errors import (
    AggregationCycleError,
    BrokenPartReferenceError,
    CycleRejectedError,
    DuplicateEdgeError,
    DuplicateIdError,
    FormatError,
    InvariantViolationError,
    SnippetParseError,
    UnknownIdError,
)
from conceptforge.graphs import ConceptGraph, GraphNode
from conceptforge.store import (
    Annotation,
    Concept,
    Curation,
    Hierarchy,
    Store,
    TypedVar,
    add_concept,
    empty_store,
    link_specialization,
    load_store,
    save_store,
    search_concepts,
    store_from_payload,
    store_to_payload,
)


def _terminal(cid, snippet_name, inputs, outputs, keywords=()):
    return Concept(
        id=cid, name=cid.replace("-", " ").capitalize(), kind="terminal",
        annotation=Annotation(
            inputs=tuple(TypedVar(n, d) for n, d in inputs),
            outputs=tuple(TypedVar(n, d) for n, d in outputs),
            keywords=frozenset(keywords),
        ),
        snippet=load_snippet(snippet_name),
    )


def _abstract(cid):
    return Concept(id=cid, name=cid, kind="abstract")


# -- add_concept -------------------------------------------------------------

def test_add_terminal_concept_grows_store():
    store = empty_store()
    grown = add_concept(store, _terminal(
        "insertion-sort", "insertion_sort",
        [("xs", "list")], [("xs", "list")], {"sort"}))
    assert len(grown.concepts) == len(store.concepts) + 1
    assert "insertion-sort" in grown.concepts
    assert store.concepts == {}


def test_add_complex_concept_with_three_parts():
    store = build_demo_store()
    assert store.concepts["merge-sort"].kind == "complex"
    parts = store.concepts["merge-sort"].parts
    assert [n.concept for n in parts.nodes] == [
        "divide-list", "sort-each-half", "merge-sorted-lists"]


def test_add_duplicate_id_rejected():
    store = build_demo_store()
    with pytest.raises(DuplicateIdError) as exc:
        add_concept(store, _abstract("heap-sort"))
    assert exc.value.detail["id"] == "heap-sort"


def test_add_self_referencing_parts_rejected():
    store = build_demo_store()
    selfish = Concept(
        id="ouroboros", name="Ouroboros", kind="complex",
        parts=ConceptGraph(nodes=(GraphNode("p1", "ouroboros"),)))
    with pytest.raises(AggregationCycleError) as exc:
        add_concept(store, selfish)
    assert exc.value.detail["path"] == ["ouroboros", "ouroboros"]


def test_add_part_reference_to_missing_concept_rejected():
    store = empty_store()
    lonely = Concept(
        id="lonely", name="Lonely", kind="complex",
        parts=ConceptGraph(nodes=(GraphNode("p1", "ghost"),)))
    with pytest.raises(BrokenPartReferenceError) as exc:
        add_concept(store, lonely)
    assert exc.value.detail["missing"] == "ghost"


def test_add_unparseable_snippet_rejected_with_position():
    store = empty_store()
    broken = Concept(
        id="broken", name="Broken", kind="terminal",
        snippet="func broken( { }")
    with pytest.raises(SnippetParseError) as exc:
        add_concept(store, broken)
    assert exc.value.detail["line"] == 1
    assert exc.value.detail["column"] >= 1


def test_snippet_must_match_annotated_interface():
    store = empty_store()
    mismatched = Concept(
        id="off-by-one", name="Off by one", kind="terminal",
        annotation=Annotation(inputs=(TypedVar("xs", "list"),
                                      TypedVar("n", "int"))),
        snippet=load_snippet("print_list"))
    with pytest.raises(InvariantViolationError):
        add_concept(store, mismatched)

    silent = Concept(
        id="silent", name="Silent", kind="terminal",
        annotation=Annotation(inputs=(TypedVar("xs", "list"),),
                              outputs=(TypedVar("xs", "list"),)),
        snippet=load_snippet("print_list"))
    with pytest.raises(InvariantViolationError):
        add_concept(store, silent)


def test_malformed_concept_id_rejected():
    with pytest.raises(InvariantViolationError):
        add_concept(empty_store(), _abstract("Not-Kebab"))
    with pytest.raises(InvariantViolationError):
        add_concept(empty_store(), _abstract("-leading-dash"))


# -- link_specialization -----------------------------------------------------

def test_demo_hierarchy_links_accepted():
    store = build_demo_store()
    edges = store.hierarchy.isa_edges
    for child in ("merge-sort", "heap-sort", "radix-sort", "insertion-sort"):
        assert (child, "ascending-sort") in edges
    assert ("for-counter-loop", "counter-loop") in edges
    assert ("while-counter-loop", "counter-loop") in edges


def test_link_cycle_rejected_with_path():
    store = empty_store()
    for cid in ("a", "b", "c"):
        store = add_concept(store, _abstract(cid))
    store = link_specialization(store, "a", "b")
    store = link_specialization(store, "b", "c")
    with pytest.raises(CycleRejectedError) as exc:
        link_specialization(store, "c", "a")
    assert exc.value.detail["path"] == ["a", "b", "c", "a"]


def test_link_self_loop_rejected():
    store = add_concept(empty_store(), _abstract("a"))
    with pytest.raises(CycleRejectedError):
        link_specialization(store, "a", "a")


def test_link_duplicate_edge_rejected():
    store = build_demo_store()
    with pytest.raises(DuplicateEdgeError):
        link_specialization(store, "merge-sort", "ascending-sort")


def test_link_unknown_endpoint_rejected():
    store = build_demo_store()
    with pytest.raises(UnknownIdError):
        link_specialization(store, "merge-sort", "ghost")
    with pytest.raises(UnknownIdError):
        link_specialization(store, "ghost", "ascending-sort")


def test_multiple_parents_permitted():
    store = empty_store()
    for cid in ("child", "mother", "father"):
        store = add_concept(store, _abstract(cid))
    store = link_specialization(store, "child", "mother")
    store = link_specialization(store, "child", "father")
    assert store.hierarchy.parents("child") == ["father", "mother"]


# -- search ------------------------------------------------------------------

def test_search_sort_finds_the_sort_family():
    store = build_demo_store()
    ids = [cid for cid, _ in search_concepts(store, "sort")]
    for expected in ("ascending-sort", "merge-sort", "heap-sort", "radix-sort"):
        assert expected in ids


def test_search_empty_query_returns_nothing():
    assert search_concepts(build_demo_store(), "") == []
    assert search_concepts(build_demo_store(), "  \t ") == []


def test_search_two_token_matches_outrank_single_token():
    store = build_demo_store()
    results = search_concepts(store, "counter loop")
    scores = dict(results)
    assert scores["for-counter-loop"] == 2.0
    assert scores["while-counter-loop"] == 2.0
    top_ids = [cid for cid, score in results if score == 2.0]
    assert set(top_ids) >= {"for-counter-loop", "while-counter-loop"}
    assert all(score <= 2.0 for _, score in results)
    # ordering is deterministic: descending score then ascending id
    assert results == sorted(results, key=lambda p: (-p[1], p[0]))


def test_search_is_case_insensitive_and_deterministic():
    store = build_demo_store()
    first = search_concepts(store, "SORT Ascending")
    second = search_concepts(store, "sort ascending")
    assert first == second
    assert first == search_concepts(store, "sort ascending")


def test_search_no_match_is_empty_not_error():
    assert search_concepts(build_demo_store(), "quaternion") == []


# -- persistence -------------------------------------------------------------

def test_round_trip_demo_store(tmp_path):
    store = build_demo_store()
    path = tmp_path / "demo.cmdb.json"
    save_store(store, str(path))
    assert load_store(str(path)) == store


def test_serialization_is_deterministic(tmp_path):
    store = build_demo_store()
    a, b = tmp_path / "a.cmdb.json", tmp_path / "b.cmdb.json"
    save_store(store, str(a))
    save_store(load_store(str(a)), str(b))
    assert a.read_bytes() == b.read_bytes()


def test_store_file_key_order(tmp_path):
    path = tmp_path / "demo.cmdb.json"
    save_store(build_demo_store(), str(path))
    payload = json.loads(path.read_text())
    assert list(payload) == ["version", "concepts", "isa"]
    first = payload["concepts"][0]
    assert list(first)[:8] == ["id", "name", "description", "kind",
                               "inputs", "outputs", "keywords", "curation"]
    ids = [c["id"] for c in payload["concepts"]]
    assert ids == sorted(ids)
    assert payload["isa"] == sorted(payload["isa"])


def test_load_rejects_unknown_version():
    with pytest.raises(FormatError) as exc:
        store_from_payload({"version": 999, "concepts": [], "isa": []})
    assert exc.value.detail["version"] == 999


def test_load_rejects_dangling_isa_edge():
    payload = store_to_payload(build_demo_store())
    payload["isa"].append(["merge-sort", "ghost"])
    with pytest.raises(InvariantViolationError):
        store_from_payload(payload)


def test_load_rejects_cyclic_isa():
    payload = store_to_payload(build_demo_store())
    payload["isa"].append(["ascending-sort", "merge-sort"])
    with pytest.raises(InvariantViolationError):
        store_from_payload(payload)


def test_load_rejects_mutual_aggregation_cycle():
    graph_a = {"nodes": [{"id": "p1", "concept": "b"}], "edges": []}
    graph_b = {"nodes": [{"id": "p1", "concept": "a"}], "edges": []}
    payload = {
        "version": 1,
        "concepts": [
            {"id": "a", "name": "A", "description": "", "kind": "complex",
             "inputs": [], "outputs": [], "keywords": [],
             "curation": {"author": "", "created": "", "notes": ""},
             "parts": graph_a},
            {"id": "b", "name": "B", "description": "", "kind": "complex",
             "inputs": [], "outputs": [], "keywords": [],
             "curation": {"author": "", "created": "", "notes": ""},
             "parts": graph_b},
        ],
        "isa": [],
    }
    with pytest.raises(AggregationCycleError):
        store_from_payload(payload)


def test_load_rejects_malformed_json(tmp_path):
    path = tmp_path / "broken.cmdb.json"
    path.write_text('{"version": 1,')
    with pytest.raises(FormatError) as exc:
        load_store(str(path))
    assert exc.value.detail["line"] >= 1


def test_snippets_reparse_after_round_trip(tmp_path):
    from conceptforge import minilang
    path = tmp_path / "demo.cmdb.json"
    save_store(build_demo_store(), str(path))
    for concept in load_store(str(path)).terminal_concepts():
        program = minilang.parse(concept.snippet)
        assert len(program.functions) == 1


# -- random store round-trips ------------------------------------------------

_ids = st.from_regex(r"[a-z0-9][a-z0-9-]{0,8}", fullmatch=True)
_words = st.text(alphabet="abcdefghij ", min_size=0, max_size=12)

_SNIPPETS = {
    (): ("read_list", ("list",)),
    ("list",): ("sum_list", ("int",)),
    ("int",): ("identity", ("int",)),
}


@st.composite
def _stores(draw):
    ids = draw(st.lists(_ids, min_size=1, max_size=50, unique=True))
    store = empty_store()
    for cid in ids:
        shape = draw(st.sampled_from(sorted(_SNIPPETS)))
        make_abstract = draw(st.booleans())
        if make_abstract:
            concept = Concept(
                id=cid, name=draw(_words) or cid, kind="abstract",
                description=draw(_words),
                annotation=Annotation(
                    keywords=frozenset(draw(st.lists(
                        st.sampled_from(["sort", "loop", "list", "merge"]),
                        max_size=3)))))
        else:
            snippet_name, out_dtypes = _SNIPPETS[shape]
            inputs = tuple(TypedVar(f"arg{i}", d)
                           for i, d in enumerate(shape))
            outputs = tuple(TypedVar("out", d) for d in out_dtypes)
            concept = Concept(
                id=cid, name=draw(_words) or cid, kind="terminal",
                description=draw(_words),
                annotation=Annotation(
                    inputs=inputs, outputs=outputs,
                    curation=Curation(author="t", created="2026-01-01T00:00:00Z",
                                      notes=draw(_words))),
                snippet=load_snippet(snippet_name))
        store = add_concept(store, concept)
    # random forward edges over the sorted id list never cycle
    ordered = sorted(ids)
    for i, child in enumerate(ordered):
        for parent in ordered[i + 1:]:
            if draw(st.booleans()):
                store = link_specialization(store, child, parent)
                break
    return store


@given(_stores())
@settings(max_examples=30, deadline=None)
def test_random_store_round_trip(tmp_path_factory, store):
    path = tmp_path_factory.mktemp("stores") / "s.cmdb.json"
    save_store(store, str(path))
    assert load_store(str(path)) == store
