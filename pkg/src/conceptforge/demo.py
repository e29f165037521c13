"""Seed store: a small sorting-and-loops concept hierarchy.

Terminal concepts wrap bundled corpus snippets; ascending-sort sits on
top as an abstract concept with four specializations, two of them
implemented (insertion-sort terminally, merge-sort as an aggregation of
three parts). Useful as a quickstart fixture: ``cforge init --demo``.
"""

from __future__ import annotations

from .corpus_data import load_snippet
from .graphs import ConceptGraph, GraphNode
from .store import (
    Annotation,
    Concept,
    Curation,
    Store,
    TypedVar,
    add_concept,
    empty_store,
    link_specialization,
)

_CREATED = "2026-01-15T09:00:00Z"


def _curation(notes: str = "") -> Curation:
    return Curation(author="seed", created=_CREATED, notes=notes)


def _terminal(cid: str, name: str, description: str, snippet_name: str,
              inputs: list[tuple[str, str]], outputs: list[tuple[str, str]],
              keywords: set[str]) -> Concept:
    return Concept(
        id=cid, name=name, description=description, kind="terminal",
        annotation=Annotation(
            inputs=tuple(TypedVar(n, d) for n, d in inputs),
            outputs=tuple(TypedVar(n, d) for n, d in outputs),
            keywords=frozenset(keywords),
            curation=_curation(),
        ),
        snippet=load_snippet(snippet_name),
    )


def _abstract(cid: str, name: str, description: str,
              keywords: set[str]) -> Concept:
    return Concept(
        id=cid, name=name, description=description, kind="abstract",
        annotation=Annotation(keywords=frozenset(keywords),
                              curation=_curation()),
    )


def build_demo_store() -> Store:
    store = empty_store()

    terminals = [
        _terminal("read-list", "Read list",
                  "Produces the fixture list to be processed.",
                  "read_list", [], [("xs", "list")],
                  {"input", "fixture", "list"}),
        _terminal("print-list", "Print list",
                  "Writes a list to the output stream.",
                  "print_list", [("xs", "list")], [],
                  {"output", "print", "list"}),
        _terminal("insertion-sort", "Insertion sort",
                  "Sorts a list ascending by shifting elements right.",
                  "insertion_sort", [("xs", "list")], [("xs", "list")],
                  {"sort", "ascending", "insertion"}),
        _terminal("divide-list", "Divide list",
                  "Splits a list at its midpoint into two halves.",
                  "divide_list", [("xs", "list")], [("halves", "list")],
                  {"divide", "split", "halves"}),
        _terminal("sort-each-half", "Sort each half",
                  "Sorts every sublist of a packed pair of halves.",
                  "sort_each_half",
                  [("halves", "list")], [("sorted_halves", "list")],
                  {"sort", "halves"}),
        _terminal("merge-sorted-lists", "Merge sorted lists",
                  "Merges a packed pair of ascending lists into one.",
                  "merge_sorted_lists",
                  [("sorted_halves", "list")], [("merged", "list")],
                  {"merge", "sorted", "lists"}),
        _terminal("for-counter-loop", "For counter loop",
                  "Accumulates a running total with a counted loop.",
                  "count_up", [("n", "int")], [("total", "int")],
                  {"counter", "loop", "for"}),
        _terminal("while-counter-loop", "While counter loop",
                  "Accumulates a running total with a condition loop.",
                  "count_while", [("n", "int")], [("total", "int")],
                  {"counter", "loop", "while"}),
        _terminal("sum-list", "Sum list",
                  "Adds up every element of a list.",
                  "sum_list", [("xs", "list")], [("total", "int")],
                  {"sum", "accumulate", "list"}),
        _terminal("find-max", "Find maximum",
                  "Finds the largest element of a list.",
                  "find_max", [("xs", "list")], [("best", "int")],
                  {"maximum", "largest", "list"}),
        _terminal("reverse-list", "Reverse list",
                  "Reverses the order of a list.",
                  "reverse_list", [("xs", "list")], [("reversed", "list")],
                  {"reverse", "order", "list"}),
        _terminal("identity", "Identity",
                  "Returns its argument unchanged.",
                  "identity", [("x", "int")], [("x", "int")],
                  {"identity", "passthrough"}),
    ]
    for concept in terminals:
        store = add_concept(store, concept)

    store = add_concept(store, Concept(
        id="merge-sort", name="Merge sort",
        description="Sorts by dividing, sorting each half, and merging.",
        kind="complex",
        annotation=Annotation(
            inputs=(TypedVar("xs", "list"),),
            outputs=(TypedVar("merged", "list"),),
            keywords=frozenset({"sort", "ascending", "merge"}),
            curation=_curation("aggregation of three parts"),
        ),
        parts=ConceptGraph(
            nodes=(
                GraphNode("p1", "divide-list"),
                GraphNode("p2", "sort-each-half"),
                GraphNode("p3", "merge-sorted-lists"),
            ),
            edges=(("p1", "p2"), ("p2", "p3")),
        ),
    ))

    abstracts = [
        _abstract("ascending-sort", "Ascending sort",
                  "Arranges a list in ascending order.",
                  {"sort", "ascending", "order"}),
        _abstract("heap-sort", "Heap sort",
                  "Sorts via a binary heap; awaiting a snippet.",
                  {"sort", "heap"}),
        _abstract("radix-sort", "Radix sort",
                  "Sorts by digit buckets; awaiting a snippet.",
                  {"sort", "radix"}),
        _abstract("counter-loop", "Counter loop",
                  "Accumulates over a counted iteration.",
                  {"counter", "loop"}),
    ]
    for concept in abstracts:
        store = add_concept(store, concept)

    for child, parent in [
        ("insertion-sort", "ascending-sort"),
        ("merge-sort", "ascending-sort"),
        ("heap-sort", "ascending-sort"),
        ("radix-sort", "ascending-sort"),
        ("for-counter-loop", "counter-loop"),
        ("while-counter-loop", "counter-loop"),
    ]:
        store = link_specialization(store, child, parent)
    return store
