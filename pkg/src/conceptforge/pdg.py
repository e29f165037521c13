"""Statement-level program dependence graphs and structural similarity.

Each snippet function becomes a graph: one node per statement plus an
entry node, control edges following the nesting structure, and data
edges computed by reaching definitions over the control-flow graph.
Signatures summarize a graph by iterative neighborhood label refinement;
identifiers and spans never enter a label, so renaming variables leaves
the signature untouched.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

from . import minilang
from .errors import (
    InvariantViolationError,
    RoundsMismatchError,
    ThresholdOutOfRangeError,
)
from .minilang import ast

DEFAULT_ROUNDS = 3

_KIND_BY_NODE = {
    ast.Let: "let",
    ast.Assign: "assign",
    ast.IndexAssign: "index-assign",
    ast.If: "if",
    ast.While: "while",
    ast.ForRange: "for",
    ast.Return: "return",
    ast.Print: "print",
    ast.ExprStmt: "expr",
}


@dataclass(frozen=True)
class PdgNode:
    node_id: int
    stmt_kind: str
    span: ast.Span
    # operator symbols in the statement's expressions, for --label-ops
    ops: tuple[str, ...] = ()


@dataclass(frozen=True)
class PdgEdge:
    src: int
    dst: int
    kind: str  # "control" or "data"
    var: str | None = None


@dataclass(frozen=True)
class Pdg:
    nodes: tuple[PdgNode, ...]
    edges: tuple[PdgEdge, ...]

    def data_edges(self) -> set[tuple[int, int, str]]:
        return {(e.src, e.dst, e.var) for e in self.edges if e.kind == "data"}

    def control_edges(self) -> set[tuple[int, int]]:
        return {(e.src, e.dst) for e in self.edges if e.kind == "control"}


# -- statement facts ---------------------------------------------------------

def _expr_vars(expr: ast.Expr, out: set[str]) -> None:
    if isinstance(expr, ast.Name):
        out.add(expr.ident)
    elif isinstance(expr, ast.Unary):
        _expr_vars(expr.operand, out)
    elif isinstance(expr, ast.Binary):
        _expr_vars(expr.left, out)
        _expr_vars(expr.right, out)
    elif isinstance(expr, ast.Index):
        _expr_vars(expr.base, out)
        _expr_vars(expr.index, out)
    elif isinstance(expr, ast.Call):
        for arg in expr.args:
            _expr_vars(arg, out)
    elif isinstance(expr, ast.ListLit):
        for item in expr.items:
            _expr_vars(item, out)


def _expr_ops(expr: ast.Expr, out: list[str]) -> None:
    if isinstance(expr, ast.Unary):
        out.append(expr.op)
        _expr_ops(expr.operand, out)
    elif isinstance(expr, ast.Binary):
        out.append(expr.op)
        _expr_ops(expr.left, out)
        _expr_ops(expr.right, out)
    elif isinstance(expr, ast.Index):
        _expr_ops(expr.base, out)
        _expr_ops(expr.index, out)
    elif isinstance(expr, ast.Call):
        for arg in expr.args:
            _expr_ops(arg, out)
    elif isinstance(expr, ast.ListLit):
        for item in expr.items:
            _expr_ops(item, out)


def _stmt_exprs(stmt: ast.Stmt) -> list[ast.Expr]:
    if isinstance(stmt, (ast.Let, ast.Assign, ast.Print, ast.ExprStmt)):
        return [stmt.value]
    if isinstance(stmt, ast.IndexAssign):
        return [stmt.index, stmt.value]
    if isinstance(stmt, (ast.If, ast.While)):
        return [stmt.cond]
    if isinstance(stmt, ast.ForRange):
        return [stmt.start, stmt.stop]
    if isinstance(stmt, ast.Return):
        return [] if stmt.value is None else [stmt.value]
    return []


def stmt_uses(stmt: ast.Stmt) -> set[str]:
    used: set[str] = set()
    for expr in _stmt_exprs(stmt):
        _expr_vars(expr, used)
    if isinstance(stmt, ast.IndexAssign):
        # writing one slot reads the current list first
        used.add(stmt.name)
    return used


def stmt_defs(stmt: ast.Stmt) -> set[str]:
    if isinstance(stmt, (ast.Let, ast.Assign, ast.IndexAssign)):
        return {stmt.name}
    if isinstance(stmt, ast.ForRange):
        return {stmt.var}
    return set()


def _stmt_ops(stmt: ast.Stmt) -> tuple[str, ...]:
    ops: list[str] = []
    for expr in _stmt_exprs(stmt):
        _expr_ops(expr, ops)
    return tuple(sorted(ops))


# -- construction ------------------------------------------------------------

def _collect(func: ast.FuncDef):
    """Number statements in source order and record nesting for control
    edges. Returns (nodes, control_edges, stmt_by_id)."""
    nodes = [PdgNode(0, "entry", func.span)]
    control: list[tuple[int, int]] = []
    stmts: dict[int, ast.Stmt] = {}
    counter = [0]

    def walk(block: ast.Block, parent: int) -> None:
        for stmt in block.statements:
            counter[0] += 1
            nid = counter[0]
            kind = _KIND_BY_NODE[type(stmt)]
            nodes.append(PdgNode(nid, kind, stmt.span, _stmt_ops(stmt)))
            control.append((parent, nid))
            stmts[nid] = stmt
            if isinstance(stmt, ast.If):
                walk(stmt.then, nid)
                if stmt.orelse is not None:
                    walk(stmt.orelse, nid)
            elif isinstance(stmt, (ast.While, ast.ForRange)):
                walk(stmt.body, nid)

    walk(func.body, 0)
    return nodes, control, stmts


def _cfg(func: ast.FuncDef, stmts: dict[int, ast.Stmt]) -> dict[int, set[int]]:
    """Successor map over node ids; -1 stands for function exit."""
    id_of = {id(stmt): nid for nid, stmt in stmts.items()}
    succ: dict[int, set[int]] = {nid: set() for nid in [0, *stmts]}

    def first_of(block: ast.Block, after: int) -> int:
        return id_of[id(block.statements[0])] if block.statements else after

    def wire(block: ast.Block, after: int) -> None:
        statements = block.statements
        for i, stmt in enumerate(statements):
            nid = id_of[id(stmt)]
            next_id = (id_of[id(statements[i + 1])]
                       if i + 1 < len(statements) else after)
            if isinstance(stmt, ast.Return):
                succ[nid].add(-1)
            elif isinstance(stmt, ast.If):
                succ[nid].add(first_of(stmt.then, next_id))
                succ[nid].add(first_of(stmt.orelse, next_id)
                              if stmt.orelse is not None else next_id)
                wire(stmt.then, next_id)
                if stmt.orelse is not None:
                    wire(stmt.orelse, next_id)
            elif isinstance(stmt, (ast.While, ast.ForRange)):
                succ[nid].add(first_of(stmt.body, nid))  # loop back edge
                succ[nid].add(next_id)
                wire(stmt.body, nid)
            else:
                succ[nid].add(next_id)

    succ[0].add(first_of(func.body, -1))
    wire(func.body, -1)
    for targets in succ.values():
        targets.discard(-1)
    return succ


def build_pdg(func: ast.FuncDef) -> Pdg:
    """Dependence graph of one function: entry + statement nodes, control
    edges by nesting, data edges by reaching definitions."""
    nodes, control, stmts = _collect(func)
    succ = _cfg(func, stmts)

    defs = {0: {p.name for p in func.params}}
    uses: dict[int, set[str]] = {0: set()}
    for nid, stmt in stmts.items():
        defs[nid] = stmt_defs(stmt)
        uses[nid] = stmt_uses(stmt)

    # reaching definitions: facts are (def node, var) pairs
    out_facts: dict[int, frozenset[tuple[int, str]]] = {
        nid: frozenset() for nid in defs}
    in_facts: dict[int, frozenset[tuple[int, str]]] = dict(out_facts)
    preds: dict[int, set[int]] = {nid: set() for nid in defs}
    for src, targets in succ.items():
        for dst in targets:
            preds[dst].add(src)

    changed = True
    while changed:
        changed = False
        for nid in sorted(defs):
            incoming = frozenset().union(*(out_facts[p] for p in preds[nid])) \
                if preds[nid] else frozenset()
            killed = {(d, v) for d, v in incoming if v in defs[nid]}
            gen = {(nid, v) for v in defs[nid]}
            outgoing = frozenset((incoming - killed) | gen)
            if incoming != in_facts[nid] or outgoing != out_facts[nid]:
                in_facts[nid] = incoming
                out_facts[nid] = outgoing
                changed = True

    data: set[tuple[int, int, str]] = set()
    for nid in sorted(defs):
        for def_node, var in in_facts[nid]:
            if var in uses[nid]:
                data.add((def_node, nid, var))

    edges = [PdgEdge(a, b, "control") for a, b in sorted(control)]
    edges.extend(PdgEdge(a, b, "data", var=v) for a, b, v in sorted(data))
    return Pdg(nodes=tuple(nodes), edges=tuple(edges))


# -- brute-force data-edge oracle ---------------------------------------------

def data_edges_bruteforce(func: ast.FuncDef) -> set[tuple[int, int, str]]:
    """Independent reference for data edges: for every (definition node,
    variable, use node) triple, search the control-flow graph for a path
    of at most 2 * node-count edges that never redefines the variable in
    between. Exponential in spirit, memoized on (position, budget)."""
    nodes, _, stmts = _collect(func)
    succ = _cfg(func, stmts)
    defs = {0: {p.name for p in func.params}}
    uses: dict[int, set[str]] = {0: set()}
    for nid, stmt in stmts.items():
        defs[nid] = stmt_defs(stmt)
        uses[nid] = stmt_uses(stmt)

    budget = 2 * len(nodes)
    found: set[tuple[int, int, str]] = set()
    for def_node in sorted(defs):
        for var in sorted(defs[def_node]):
            for use_node in sorted(uses):
                if var not in uses[use_node]:
                    continue
                memo: dict[tuple[int, int], bool] = {}

                def reaches(position: int, steps_left: int) -> bool:
                    if steps_left <= 0:
                        return False
                    key = (position, steps_left)
                    if key in memo:
                        return memo[key]
                    memo[key] = False  # cut cycles while exploring
                    hit = False
                    for nxt in sorted(succ.get(position, ())):
                        if nxt == use_node:
                            hit = True
                            break
                        if var in defs[nxt]:
                            continue  # redefined along this path
                        if reaches(nxt, steps_left - 1):
                            hit = True
                            break
                    memo[key] = hit
                    return hit

                if reaches(def_node, budget):
                    found.add((def_node, use_node, var))
    return found


# -- signatures ---------------------------------------------------------------

@dataclass(frozen=True)
class WlSignature:
    rounds: int
    # per round: sorted (label, count) pairs
    features: tuple[tuple[tuple[str, int], ...], ...]

    def round_counts(self, round_index: int) -> dict[str, int]:
        return dict(self.features[round_index])


def _digest(base: str, neighborhood: list[tuple[str, str]]) -> str:
    text = base + "|" + ";".join(f"{kind}:{label}" for kind, label in neighborhood)
    return hashlib.sha1(text.encode("utf-8")).hexdigest()


def wl_signature(pdg: Pdg, rounds: int = DEFAULT_ROUNDS,
                 label_ops: bool = False) -> WlSignature:
    """Iterative label refinement. Round 0 labels are statement kinds
    (optionally refined by operator multiset); each later round hashes a
    node's label with the sorted multiset of (edge kind, neighbor label)
    over incoming and outgoing edges."""
    if rounds < 0:
        raise InvariantViolationError("rounds must be >= 0", stage="cluster",
                                      rounds=rounds)
    labels: dict[int, str] = {}
    for node in pdg.nodes:
        if label_ops and node.ops:
            labels[node.node_id] = node.stmt_kind + "(" + ",".join(node.ops) + ")"
        else:
            labels[node.node_id] = node.stmt_kind

    neighborhoods: dict[int, list[tuple[str, int]]] = {
        n.node_id: [] for n in pdg.nodes}
    for edge in pdg.edges:
        neighborhoods[edge.src].append((edge.kind, edge.dst))
        neighborhoods[edge.dst].append((edge.kind, edge.src))

    per_round = []
    for round_index in range(rounds + 1):
        counts: dict[str, int] = {}
        for node in pdg.nodes:
            label = labels[node.node_id]
            counts[label] = counts.get(label, 0) + 1
        per_round.append(tuple(sorted(counts.items())))
        if round_index == rounds:
            break
        labels = {
            nid: _digest(labels[nid], sorted(
                (kind, labels[other]) for kind, other in neighborhoods[nid]))
            for nid in labels
        }
    return WlSignature(rounds=rounds, features=tuple(per_round))


def similarity(a: WlSignature, b: WlSignature) -> float:
    """Cosine similarity of the concatenated per-round count vectors.
    Equal signatures score exactly 1.0."""
    if a.rounds != b.rounds:
        raise RoundsMismatchError(
            f"signatures use different refinement depths: {a.rounds} vs {b.rounds}",
            left=a.rounds, right=b.rounds)
    if a.features == b.features:
        return 1.0
    dot = 0
    norm_a = 0
    norm_b = 0
    for round_a, round_b in zip(a.features, b.features):
        counts_b = dict(round_b)
        for label, count in round_a:
            norm_a += count * count
            dot += count * counts_b.get(label, 0)
        for _, count in round_b:
            norm_b += count * count
    if norm_a == 0 or norm_b == 0:
        return 0.0
    value = dot / math.sqrt(norm_a * norm_b)
    return min(max(value, 0.0), 1.0)


def signature_for_snippet(snippet: str, rounds: int = DEFAULT_ROUNDS,
                          label_ops: bool = False) -> WlSignature:
    program = minilang.parse(snippet)
    return wl_signature(build_pdg(program.functions[0]), rounds, label_ops)


# -- clustering ----------------------------------------------------------------

@dataclass(frozen=True)
class ClusterResult:
    ids: tuple[str, ...]
    matrix: tuple[tuple[float, ...], ...]
    clusters: tuple[tuple[str, ...], ...]
    suggestions: tuple[str, ...]


def cluster_snippets(store, threshold: float, rounds: int = DEFAULT_ROUNDS,
                     label_ops: bool = False) -> ClusterResult:
    """Single-linkage clusters over pairwise signature similarity of every
    terminal concept. Multi-member clusters yield placement suggestions;
    nothing is ever applied to the hierarchy automatically."""
    if not (0.0 < threshold <= 1.0):
        raise ThresholdOutOfRangeError(
            f"threshold must be in (0, 1], got {threshold}",
            threshold=threshold)
    terminals = list(store.terminal_concepts())
    ids = tuple(c.id for c in terminals)
    signatures = [signature_for_snippet(c.snippet, rounds, label_ops)
                  for c in terminals]

    size = len(ids)
    matrix = [[1.0] * size for _ in range(size)]
    for i in range(size):
        for j in range(i + 1, size):
            score = similarity(signatures[i], signatures[j])
            matrix[i][j] = score
            matrix[j][i] = score

    parent = list(range(size))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in range(size):
        for j in range(i + 1, size):
            if matrix[i][j] >= threshold:
                parent[find(i)] = find(j)

    groups: dict[int, list[str]] = {}
    for index, cid in enumerate(ids):
        groups.setdefault(find(index), []).append(cid)
    clusters = tuple(sorted((tuple(sorted(members)) for members in groups.values()),
                            key=lambda c: c[0]))
    suggestions = tuple(
        "consider a common parent concept for: " + ", ".join(cluster)
        for cluster in clusters if len(cluster) > 1)
    return ClusterResult(ids=ids,
                         matrix=tuple(tuple(row) for row in matrix),
                         clusters=clusters,
                         suggestions=suggestions)
