"""AST node definitions.

Every statement and expression carries a source span. Spans are excluded
from equality so ``==`` between trees is structural identity, which is
what the parser round-trip contract compares.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

DTYPES = ("int", "real", "bool", "str", "list")


@dataclass(frozen=True)
class Span:
    line: int
    column: int
    length: int


_NO_SPAN = Span(0, 0, 0)


def _span_field() -> Span:
    return field(default=_NO_SPAN, compare=False)  # type: ignore[return-value]


# --- expressions -----------------------------------------------------------

@dataclass(frozen=True)
class IntLit:
    value: int
    span: Span = _span_field()


@dataclass(frozen=True)
class RealLit:
    value: float
    span: Span = _span_field()


@dataclass(frozen=True)
class BoolLit:
    value: bool
    span: Span = _span_field()


@dataclass(frozen=True)
class StrLit:
    value: str
    span: Span = _span_field()


@dataclass(frozen=True)
class Name:
    ident: str
    span: Span = _span_field()


@dataclass(frozen=True)
class ListLit:
    items: tuple[Expr, ...]
    span: Span = _span_field()


@dataclass(frozen=True)
class Unary:
    op: str  # "-" | "not"
    operand: Expr
    span: Span = _span_field()


@dataclass(frozen=True)
class Binary:
    op: str  # or and == != < <= > >= + - * / %
    left: Expr
    right: Expr
    span: Span = _span_field()


@dataclass(frozen=True)
class Index:
    base: Expr
    index: Expr
    span: Span = _span_field()


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple[Expr, ...]
    span: Span = _span_field()


Expr = Union[IntLit, RealLit, BoolLit, StrLit, Name, ListLit, Unary, Binary, Index, Call]


# --- statements ------------------------------------------------------------

@dataclass(frozen=True)
class Let:
    name: str
    value: Expr
    span: Span = _span_field()


@dataclass(frozen=True)
class Assign:
    name: str
    value: Expr
    span: Span = _span_field()


@dataclass(frozen=True)
class IndexAssign:
    name: str
    index: Expr
    value: Expr
    span: Span = _span_field()


@dataclass(frozen=True)
class If:
    cond: Expr
    then: Block
    orelse: Block | None
    span: Span = _span_field()


@dataclass(frozen=True)
class While:
    cond: Expr
    body: Block
    span: Span = _span_field()


@dataclass(frozen=True)
class ForRange:
    var: str
    start: Expr
    stop: Expr
    body: Block
    span: Span = _span_field()


@dataclass(frozen=True)
class Return:
    value: Expr | None
    span: Span = _span_field()


@dataclass(frozen=True)
class Print:
    value: Expr
    span: Span = _span_field()


@dataclass(frozen=True)
class ExprStmt:
    value: Expr
    span: Span = _span_field()


Stmt = Union[Let, Assign, IndexAssign, If, While, ForRange, Return, Print, ExprStmt]


@dataclass(frozen=True)
class Block:
    statements: tuple[Stmt, ...]
    span: Span = _span_field()


@dataclass(frozen=True)
class Param:
    name: str
    dtype: str
    span: Span = _span_field()


@dataclass(frozen=True)
class FuncDef:
    name: str
    params: tuple[Param, ...]
    return_dtype: str | None
    body: Block
    span: Span = _span_field()


@dataclass(frozen=True)
class Program:
    functions: tuple[FuncDef, ...]


def walk_statements(block: Block):
    """Yield every statement in the block, nested ones included, in source order."""
    for stmt in block.statements:
        yield stmt
        if isinstance(stmt, If):
            yield from walk_statements(stmt.then)
            if stmt.orelse is not None:
                yield from walk_statements(stmt.orelse)
        elif isinstance(stmt, (While, ForRange)):
            yield from walk_statements(stmt.body)
