"""Independent reference implementations used to cross-check results.

These deliberately take different algorithmic routes than the library so
an agreement between the two is evidence, not an echo.
"""

from __future__ import annotations

import random

from conceptforge.store import (
    Annotation,
    Concept,
    Store,
    TypedVar,
    add_concept,
    empty_store,
    link_specialization,
)


def resolve_enumerate(store: Store, concept_id: str) -> str | None:
    """Literal path enumeration: walks every downward isa path and keeps
    the longest arrival depth per concept. Exponential, tiny graphs only."""
    depths: dict[str, int] = {}

    def walk(cid: str, length: int) -> None:
        if depths.get(cid, -1) < length:
            depths[cid] = length
        for child in store.hierarchy.children(cid):
            walk(child, length + 1)

    walk(concept_id, 0)
    implemented = [(cid, depth) for cid, depth in depths.items()
                   if store.concept(cid).implemented]
    if not implemented:
        return None
    best = max(depth for _, depth in implemented)
    return min(cid for cid, depth in implemented if depth == best)


def resolve_backward(store: Store, concept_id: str) -> str | None:
    """Longest root-to-node distance computed backward through parent
    links with memoization, instead of forward relaxation."""
    descendants: set[str] = set()
    stack = [concept_id]
    while stack:
        current = stack.pop()
        if current in descendants:
            continue
        descendants.add(current)
        stack.extend(store.hierarchy.children(current))

    memo: dict[str, int] = {}

    def depth(cid: str) -> int:
        if cid == concept_id:
            return 0
        if cid not in memo:
            memo[cid] = 1 + max(depth(p) for p in store.hierarchy.parents(cid)
                                if p in descendants)
        return memo[cid]

    implemented = [(cid, depth(cid)) for cid in descendants
                   if store.concept(cid).implemented]
    if not implemented:
        return None
    best = max(d for _, d in implemented)
    return min(cid for cid, d in implemented if d == best)


def random_hierarchy_store(rng: random.Random, max_nodes: int = 50,
                           implemented_bias: float = 0.5) -> Store:
    """Store with a random isa DAG; roughly half the concepts carry an
    implementation, edges only point from later ids to earlier ones."""
    count = rng.randint(2, max_nodes)
    store = empty_store()
    ids = [f"c{i:02d}" for i in range(count)]
    for i, cid in enumerate(ids):
        if rng.random() < implemented_bias:
            store = add_concept(store, Concept(
                id=cid, name=f"concept {i}", kind="terminal",
                annotation=Annotation(
                    inputs=(TypedVar("x", "int"),),
                    outputs=(TypedVar("x", "int"),)),
                snippet=f"func impl_{i}(x: int) -> int {{ return x; }}"))
        else:
            store = add_concept(store, Concept(
                id=cid, name=f"concept {i}", kind="abstract"))
    for i in range(1, count):
        for parent_index in rng.sample(range(i), k=min(i, rng.randint(0, 2))):
            store = link_specialization(store, ids[i], ids[parent_index])
    return store
