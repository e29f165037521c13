"""From precedence graph to executable program.

The pipeline has four stages. ``resolve_concept`` maps a concept
reference to its most specialized implemented descendant. ``expand_graph``
replaces complex concepts by their part-graphs until every node is
terminal. ``harmonize`` binds each node's inputs to upstream outputs via
a deterministic matching cascade. ``emit_program`` renders the snippet
functions plus a ``main`` that threads variables between calls.

An input with no upstream output anywhere becomes a parameter of the
emitted ``main``; when the graph has exactly one sink and that sink
carries an output, ``main`` returns it. A single-node graph therefore
wraps its snippet without changing its observable behavior.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from . import minilang
from .errors import (
    AmbiguousBindingError,
    ExpansionDepthExceededError,
    InvariantViolationError,
    NoImplementationError,
    UnboundInputError,
    UnknownIdError,
)
from .graphs import ConceptGraph, GraphNode
from .minilang import ast
from .minilang.parser import BUILTINS
from .store import Store, TypedVar

MAX_EXPANSION_DEPTH = 32

# normalized-name synonym groups consulted at cascade level 3
SYNONYM_GROUPS = (
    frozenset({"arr", "array", "list", "lst", "xs"}),
    frozenset({"n", "count", "size", "len"}),
    frozenset({"result", "out", "output", "res"}),
)


def _normalize(name: str) -> str:
    return name.lower().replace("_", "")


def _synonyms(name: str) -> frozenset[str] | None:
    normalized = _normalize(name)
    for group in SYNONYM_GROUPS:
        if normalized in group:
            return group
    return None


# -- mapper -------------------------------------------------------------------

def resolve_concept(store: Store, concept_id: str) -> str:
    """Most specialized implemented concept at or below `concept_id`:
    maximum length of an isa path down from the id wins, ties break by
    ascending id."""
    if concept_id not in store.concepts:
        raise UnknownIdError(f"unknown concept id {concept_id!r}",
                             stage="resolve", id=concept_id)
    depths = {concept_id: 0}
    order = [concept_id]
    index = 0
    while index < len(order):
        current = order[index]
        index += 1
        for child in store.hierarchy.children(current):
            candidate_depth = depths[current] + 1
            if child not in depths:
                depths[child] = candidate_depth
                order.append(child)
            elif candidate_depth > depths[child]:
                depths[child] = candidate_depth
                order.append(child)  # re-relax below with the longer path
    implemented = [(cid, depth) for cid, depth in depths.items()
                   if store.concept(cid).implemented]
    if not implemented:
        raise NoImplementationError(
            f"neither {concept_id!r} nor any of its specializations carries "
            "an implementation", id=concept_id)
    best_depth = max(depth for _, depth in implemented)
    return min(cid for cid, depth in implemented if depth == best_depth)


# -- aggregator: expansion -----------------------------------------------------

@dataclass(frozen=True)
class ResolvedNode:
    node_id: str
    concept: str
    func: ast.FuncDef
    inputs: tuple[TypedVar, ...]
    output: TypedVar | None
    bindings: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True)
class ResolvedGraph:
    nodes: tuple[ResolvedNode, ...]
    edges: tuple[tuple[str, str], ...]

    def node(self, node_id: str) -> ResolvedNode:
        for node in self.nodes:
            if node.node_id == node_id:
                return node
        raise KeyError(node_id)

    def as_concept_graph(self) -> ConceptGraph:
        return ConceptGraph(
            nodes=tuple(GraphNode(n.node_id, n.concept, n.bindings)
                        for n in self.nodes),
            edges=self.edges)


def _splice(graph: ConceptGraph, node: GraphNode,
            parts: ConceptGraph) -> ConceptGraph:
    """Replace `node` by the part-graph: incoming edges re-target every
    part source, outgoing edges re-originate from every part sink."""
    prefix = f"{node.node_id}."
    new_nodes = [n for n in graph.nodes if n.node_id != node.node_id]
    for part in parts.nodes:
        new_nodes.append(GraphNode(
            node_id=prefix + part.node_id,
            concept=part.concept,
            # the outer node's explicit bindings ride along; they apply
            # wherever the named input actually lives after splicing
            bindings=tuple(sorted(set(part.bindings) | set(node.bindings)))))
    sources = [prefix + nid for nid in parts.sources()]
    sinks = [prefix + nid for nid in parts.sinks()]
    new_edges: set[tuple[str, str]] = set()
    for a, b in graph.edges:
        if a == node.node_id and b == node.node_id:
            continue
        if b == node.node_id:
            new_edges.update((a, s) for s in sources)
        elif a == node.node_id:
            new_edges.update((s, b) for s in sinks)
        else:
            new_edges.add((a, b))
    new_edges.update((prefix + a, prefix + b) for a, b in parts.edges)
    return ConceptGraph(
        nodes=tuple(sorted(new_nodes, key=lambda n: n.node_id)),
        edges=tuple(sorted(new_edges)))


def expand_graph(store: Store, graph: ConceptGraph) -> ResolvedGraph:
    """Resolve every node via the mapper and inline complex results until
    only terminal concepts remain."""
    if not graph.nodes:
        raise InvariantViolationError("cannot expand an empty graph",
                                      stage="expand")
    graph.validate()
    for node in graph.nodes:
        if node.concept not in store.concepts:
            raise UnknownIdError(
                f"node {node.node_id!r} references unknown concept "
                f"{node.concept!r}", stage="resolve",
                id=node.concept, node=node.node_id)

    work = graph
    for _ in range(MAX_EXPANSION_DEPTH + 1):
        replaced = False
        for node in sorted(work.nodes, key=lambda n: n.node_id):
            resolved_id = resolve_concept(store, node.concept)
            resolved = store.concept(resolved_id)
            if resolved.kind == "complex":
                work = _splice(work, node, resolved.parts)
                replaced = True
        if not replaced:
            break
    else:
        raise ExpansionDepthExceededError(
            f"expansion did not terminate within {MAX_EXPANSION_DEPTH} "
            "passes", limit=MAX_EXPANSION_DEPTH)

    work.validate()
    nodes = []
    for node in work.nodes:
        concept = store.concept(resolve_concept(store, node.concept))
        program = minilang.parse(concept.snippet)
        annotation = concept.annotation
        nodes.append(ResolvedNode(
            node_id=node.node_id,
            concept=concept.id,
            func=program.functions[0],
            inputs=annotation.inputs,
            output=annotation.outputs[0] if annotation.outputs else None,
            bindings=node.bindings))
    return ResolvedGraph(nodes=tuple(nodes), edges=work.edges)


# -- aggregator: harmonization ---------------------------------------------------

@dataclass(frozen=True)
class BindingPlan:
    """Who feeds whom, and what everything is called in the output.

    ``inputs`` rows are (node, input name, source node, source output);
    an empty source node means the input becomes a main parameter whose
    name sits in the output slot. ``functions`` and ``outputs`` rows are
    (node, original identifier, emitted identifier) for each node's
    snippet function name and output variable; together they form the
    rename map applied during emission.
    """

    inputs: tuple[tuple[str, str, str, str], ...]
    functions: tuple[tuple[str, str, str], ...]
    outputs: tuple[tuple[str, str, str], ...]

    def input_source(self, node_id: str, input_name: str) -> tuple[str, str]:
        for node, name, source, output in self.inputs:
            if node == node_id and name == input_name:
                return source, output
        raise KeyError((node_id, input_name))

    def function_name(self, node_id: str) -> str:
        for node, _, new in self.functions:
            if node == node_id:
                return new
        raise KeyError(node_id)

    def output_var(self, node_id: str) -> str:
        for node, _, new in self.outputs:
            if node == node_id:
                return new
        raise KeyError(node_id)

    def emitted_name(self, node_id: str, original: str) -> str:
        for node, old, new in self.outputs + self.functions:
            if node == node_id and old == original:
                return new
        raise KeyError((node_id, original))


def _proximity_rings(graph: ResolvedGraph, node_id: str) -> list[list[str]]:
    """Breadth-first layers of transitive predecessors, nearest first."""
    rings: list[list[str]] = []
    seen = {node_id}
    frontier = [node_id]
    while frontier:
        layer: list[str] = []
        for nid in frontier:
            for pred in sorted(a for a, b in graph.edges if b == nid):
                if pred not in seen:
                    seen.add(pred)
                    layer.append(pred)
        if not layer:
            break
        rings.append(sorted(layer))
        frontier = layer
    return rings


def _cascade_match(level: int, input_var: TypedVar,
                   candidate: TypedVar) -> bool:
    if level == 1:
        return candidate.name == input_var.name
    if level == 2:
        return _normalize(candidate.name) == _normalize(input_var.name)
    if level == 3:
        group = _synonyms(input_var.name)
        return group is not None and _normalize(candidate.name) in group
    return candidate.dtype == input_var.dtype


def _candidate_payload(pairs: list[tuple[str, TypedVar]]) -> list[dict]:
    return [{"node": nid, "output": var.name, "dtype": var.dtype}
            for nid, var in pairs]


def _bind_input(graph: ResolvedGraph, node: ResolvedNode,
                input_var: TypedVar) -> tuple[str, str] | None:
    """Cascade over proximity rings; None means no upstream output exists
    anywhere, so the input is promoted to a main parameter."""
    rings = _proximity_rings(graph, node.node_id)
    all_candidates: list[tuple[str, TypedVar]] = []
    for ring in rings:
        ring_candidates = [(nid, graph.node(nid).output) for nid in ring
                           if graph.node(nid).output is not None]
        all_candidates.extend(ring_candidates)
        if not ring_candidates:
            continue
        first_tie: tuple[int, list[tuple[str, TypedVar]]] | None = None
        for level in (1, 2, 3, 4):
            matched = [(nid, var) for nid, var in ring_candidates
                       if _cascade_match(level, input_var, var)]
            if len(matched) == 1:
                return matched[0][0], matched[0][1].name
            if len(matched) > 1 and first_tie is None:
                first_tie = (level, matched)
        if first_tie is not None:
            level, tied = first_tie
            raise AmbiguousBindingError(
                f"input {input_var.name!r} of node {node.node_id!r} matches "
                f"{len(tied)} upstream outputs at cascade level {level} and "
                "nothing closer disambiguates",
                node=node.node_id, input=input_var.name, level=level,
                candidates=_candidate_payload(tied))
        # candidates in this ring matched nothing at any level: nearer
        # producers shadow farther ones only when they match, so keep looking
    if not all_candidates:
        return None
    raise UnboundInputError(
        f"no upstream output matches input {input_var.name!r} of node "
        f"{node.node_id!r} at any cascade level",
        node=node.node_id, input=input_var.name,
        candidates=_candidate_payload(all_candidates))


def _resolve_explicit(graph: ResolvedGraph, node: ResolvedNode,
                      input_var: TypedVar, target: str) -> tuple[str, str]:
    if "." not in target:
        raise InvariantViolationError(
            f"explicit binding for {input_var.name!r} of node "
            f"{node.node_id!r} must look like 'node.output', got {target!r}",
            stage="harmonize", node=node.node_id, input=input_var.name)
    source_id, output_name = target.rsplit(".", 1)
    try:
        source = graph.node(source_id)
    except KeyError:
        raise InvariantViolationError(
            f"explicit binding of {node.node_id!r} references unknown node "
            f"{source_id!r}", stage="harmonize",
            node=node.node_id, input=input_var.name, source=source_id)
    if source.output is None or source.output.name != output_name:
        raise InvariantViolationError(
            f"node {source_id!r} has no output named {output_name!r}",
            stage="harmonize", node=node.node_id, input=input_var.name,
            source=source_id, output=output_name)
    upstream = {nid for ring in _proximity_rings(graph, node.node_id)
                for nid in ring}
    if source_id not in upstream:
        raise InvariantViolationError(
            f"explicit binding of {node.node_id!r} references {source_id!r}, "
            "which does not precede it", stage="harmonize",
            node=node.node_id, input=input_var.name, source=source_id)
    return source_id, output_name


def _identifier_for(node_id: str) -> str:
    return re.sub(r"[^A-Za-z0-9_]", "_", node_id)


def _function_name(concept_id: str, taken: set[str]) -> str:
    name = concept_id.replace("-", "_")
    while name in taken or name == "main" or name in BUILTINS:
        name += "_fn"
    return name


def harmonize(graph: ResolvedGraph) -> BindingPlan:
    """Bind every input of every node: explicit bindings first, then the
    cascade (exact name, normalized name, synonym table, unique dtype)
    over predecessors nearest first."""
    order = graph.as_concept_graph().topo_order()
    function_names: dict[str, str] = {}
    taken: set[str] = set()
    for node_id in order:
        concept_id = graph.node(node_id).concept
        if concept_id not in function_names:
            function_names[concept_id] = _function_name(concept_id, taken)
            taken.add(function_names[concept_id])

    inputs: list[tuple[str, str, str, str]] = []
    functions: list[tuple[str, str, str]] = []
    outputs: list[tuple[str, str, str]] = []
    used_vars: set[str] = set(taken)

    def fresh_var(base: str, node_id: str) -> str:
        if base not in used_vars:
            used_vars.add(base)
            return base
        candidate = f"{base}_{_identifier_for(node_id)}"
        while candidate in used_vars:
            candidate += "_x"
        used_vars.add(candidate)
        return candidate

    for node_id in order:
        node = graph.node(node_id)
        functions.append((node_id, node.func.name,
                          function_names[node.concept]))
        for input_var in node.inputs:
            explicit = None
            for name, target in node.bindings:
                if name == input_var.name:
                    explicit = target
                    break
            if explicit is not None:
                source_id, output_name = _resolve_explicit(
                    graph, node, input_var, explicit)
                inputs.append((node_id, input_var.name, source_id, output_name))
                continue
            bound = _bind_input(graph, node, input_var)
            if bound is None:
                param = fresh_var(input_var.name, node_id)
                inputs.append((node_id, input_var.name, "", param))
            else:
                inputs.append((node_id, input_var.name, bound[0], bound[1]))
        if node.output is not None:
            var = fresh_var(node.output.name, node_id)
            outputs.append((node_id, node.output.name, var))

    return BindingPlan(inputs=tuple(inputs), functions=tuple(functions),
                       outputs=tuple(outputs))


# -- aggregator: emission ---------------------------------------------------------

@dataclass(frozen=True)
class GeneratedProgram:
    backend: str
    source: str
    # (node id, first line, last line) of the node's call in main
    provenance: tuple[tuple[str, int, int], ...]

    def provenance_map(self) -> dict[str, list[int]]:
        return {nid: [start, end] for nid, start, end in self.provenance}


class _Renamer:
    """AST substitution: rebuilds a function with variables and call
    targets renamed. Never touches source text."""

    def __init__(self, var_map: dict[str, str], func_map: dict[str, str]):
        self.vars = var_map
        self.funcs = func_map

    def var(self, name: str) -> str:
        return self.vars.get(name, name)

    def expr(self, expr: ast.Expr) -> ast.Expr:
        if isinstance(expr, ast.Name):
            return ast.Name(self.var(expr.ident), span=expr.span)
        if isinstance(expr, ast.Unary):
            return ast.Unary(expr.op, self.expr(expr.operand), span=expr.span)
        if isinstance(expr, ast.Binary):
            return ast.Binary(expr.op, self.expr(expr.left),
                              self.expr(expr.right), span=expr.span)
        if isinstance(expr, ast.Index):
            return ast.Index(self.expr(expr.base), self.expr(expr.index),
                             span=expr.span)
        if isinstance(expr, ast.Call):
            return ast.Call(self.funcs.get(expr.func, expr.func),
                            tuple(self.expr(a) for a in expr.args),
                            span=expr.span)
        if isinstance(expr, ast.ListLit):
            return ast.ListLit(tuple(self.expr(i) for i in expr.items),
                               span=expr.span)
        return expr

    def block(self, block: ast.Block) -> ast.Block:
        return ast.Block(tuple(self.stmt(s) for s in block.statements))

    def stmt(self, stmt: ast.Stmt) -> ast.Stmt:
        if isinstance(stmt, ast.Let):
            return ast.Let(self.var(stmt.name), self.expr(stmt.value),
                           span=stmt.span)
        if isinstance(stmt, ast.Assign):
            return ast.Assign(self.var(stmt.name), self.expr(stmt.value),
                              span=stmt.span)
        if isinstance(stmt, ast.IndexAssign):
            return ast.IndexAssign(self.var(stmt.name), self.expr(stmt.index),
                                   self.expr(stmt.value), span=stmt.span)
        if isinstance(stmt, ast.If):
            orelse = self.block(stmt.orelse) if stmt.orelse is not None else None
            return ast.If(self.expr(stmt.cond), self.block(stmt.then), orelse,
                          span=stmt.span)
        if isinstance(stmt, ast.While):
            return ast.While(self.expr(stmt.cond), self.block(stmt.body),
                             span=stmt.span)
        if isinstance(stmt, ast.ForRange):
            return ast.ForRange(self.var(stmt.var), self.expr(stmt.start),
                                self.expr(stmt.stop), self.block(stmt.body),
                                span=stmt.span)
        if isinstance(stmt, ast.Return):
            value = self.expr(stmt.value) if stmt.value is not None else None
            return ast.Return(value, span=stmt.span)
        if isinstance(stmt, ast.Print):
            return ast.Print(self.expr(stmt.value), span=stmt.span)
        if isinstance(stmt, ast.ExprStmt):
            return ast.ExprStmt(self.expr(stmt.value), span=stmt.span)
        raise TypeError(f"unknown statement node: {stmt!r}")


def rename_identifiers(func: ast.FuncDef, var_map: dict[str, str],
                       new_name: str | None = None) -> ast.FuncDef:
    """Rebuild `func` with variables renamed per `var_map` and, when
    `new_name` is given, the function itself (recursive calls included)."""
    target = new_name if new_name is not None else func.name
    renamer = _Renamer(dict(var_map), {func.name: target})
    return ast.FuncDef(
        name=target,
        params=tuple(ast.Param(renamer.var(p.name), p.dtype)
                     for p in func.params),
        return_dtype=func.return_dtype,
        body=renamer.block(func.body),
        span=func.span)


def _build_program(graph: ResolvedGraph,
                   plan: BindingPlan) -> tuple[ast.Program, list[str]]:
    """Emitted tree plus the node order of main's leading call statements."""
    order = graph.as_concept_graph().topo_order()

    functions: list[ast.FuncDef] = []
    seen_concepts: set[str] = set()
    for node_id in sorted(order, key=lambda nid: graph.node(nid).concept):
        node = graph.node(node_id)
        if node.concept in seen_concepts:
            continue
        seen_concepts.add(node.concept)
        functions.append(rename_identifiers(
            node.func, {}, plan.function_name(node_id)))
    functions.sort(key=lambda f: f.name)

    params: list[ast.Param] = []
    body: list[ast.Stmt] = []
    for node_id in order:
        node = graph.node(node_id)
        args: list[ast.Expr] = []
        for input_var in node.inputs:
            source, output = plan.input_source(node_id, input_var.name)
            if source == "":
                if all(p.name != output for p in params):
                    params.append(ast.Param(output, input_var.dtype))
                args.append(ast.Name(output))
            else:
                args.append(ast.Name(plan.output_var(source)))
        call = ast.Call(plan.function_name(node_id), tuple(args))
        if node.output is not None:
            body.append(ast.Let(plan.output_var(node_id), call))
        else:
            body.append(ast.ExprStmt(call))

    sinks = graph.as_concept_graph().sinks()
    return_dtype = None
    if len(sinks) == 1 and graph.node(sinks[0]).output is not None:
        sink = graph.node(sinks[0])
        return_dtype = sink.output.dtype
        body.append(ast.Return(ast.Name(plan.output_var(sink.node_id))))

    main = ast.FuncDef(name="main", params=tuple(params),
                       return_dtype=return_dtype,
                       body=ast.Block(tuple(body)))
    return ast.Program(functions=tuple(functions) + (main,)), order


def emit_program(graph: ResolvedGraph, plan: BindingPlan,
                 backend: str = "minilang") -> GeneratedProgram:
    """Render the resolved graph: every distinct snippet function once,
    then a main calling each node in topological order."""
    from . import backends

    program, order = _build_program(graph, plan)
    if backend == "minilang":
        source = minilang.pretty_print(program)
        reparsed = minilang.parse(source)
        main = reparsed.functions[-1]
        lines = [stmt.span.line for stmt in main.body.statements]
    elif backend in ("c-like", "py-like"):
        source, lines = backends.render(program, backend)
    else:
        raise InvariantViolationError(
            f"unknown backend {backend!r}; expected minilang, c-like, or "
            "py-like", stage="emit", backend=backend)
    provenance = tuple((node_id, lines[i], lines[i])
                       for i, node_id in enumerate(order))
    return GeneratedProgram(backend=backend, source=source,
                            provenance=provenance)


def synthesize(store: Store, graph: ConceptGraph,
               backend: str = "minilang") -> GeneratedProgram:
    """resolve, expand, harmonize, emit; deterministic end to end."""
    resolved = expand_graph(store, graph)
    plan = harmonize(resolved)
    return emit_program(resolved, plan, backend)
