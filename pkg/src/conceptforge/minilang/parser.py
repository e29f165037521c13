"""Recursive-descent parser.

Grammar (authoritative):

    program  = { funcdef } ;
    funcdef  = "func" IDENT "(" [ param { "," param } ] ")" [ "->" type ] block ;
    param    = IDENT ":" type ;
    type     = "int" | "real" | "bool" | "str" | "list" ;
    block    = "{" { stmt } "}" ;
    stmt     = "let" IDENT "=" expr ";"
             | IDENT "=" expr ";"
             | IDENT "[" expr "]" "=" expr ";"
             | "if" expr block [ "else" block ]
             | "while" expr block
             | "for" IDENT "in" "range" "(" expr "," expr ")" block
             | "return" [ expr ] ";"
             | "print" "(" expr ")" ";"
             | expr ";" ;
    expr     = or < and < not < (== != < <= > >=) < (+ -) < (* / %)
               < unary- < postfix(index) < primary ;
    primary  = INT | REAL | STRING | "true" | "false" | IDENT
             | "[" [ expr { "," expr } ] "]" | "(" expr ")"
             | IDENT "(" [ expr { "," expr } ] ")" ;
    comments = "//" to end of line ;
"""

from __future__ import annotations

from ..errors import MiniParseError
from . import ast
from .lexer import Token, tokenize

# Names with built-in call semantics; user functions may not shadow them.
BUILTINS = ("len", "push", "swap")

_CMP_OPS = ("==", "!=", "<", "<=", ">", ">=")
_ADD_OPS = ("+", "-")
_MUL_OPS = ("*", "/", "%")


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.tokens = tokenize(source)
        self.pos = 0

    # -- token plumbing ------------------------------------------------

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, ahead: int = 1) -> Token:
        idx = min(self.pos + ahead, len(self.tokens) - 1)
        return self.tokens[idx]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def at(self, *kinds: str) -> bool:
        return self.current.kind in kinds

    def accept(self, kind: str) -> Token | None:
        if self.current.kind == kind:
            return self.advance()
        return None

    def expect(self, kind: str, expected_label: str | None = None) -> Token:
        if self.current.kind == kind:
            return self.advance()
        raise self.fail([expected_label or kind])

    def fail(self, expected: list[str]) -> MiniParseError:
        tok = self.current
        found = tok.text if tok.kind != "EOF" else "end of input"
        return MiniParseError(
            f"expected {' or '.join(expected)}, found {found!r}",
            line=tok.line, column=tok.column,
            expected=sorted(expected), found=found,
        )

    def span_from(self, start: Token) -> ast.Span:
        prev = self.tokens[self.pos - 1] if self.pos > 0 else start
        end = prev.offset + prev.length
        return ast.Span(start.line, start.column, max(end - start.offset, start.length))

    # -- grammar -------------------------------------------------------

    def program(self) -> ast.Program:
        functions = []
        while not self.at("EOF"):
            if not self.at("func"):
                raise self.fail(["func"])
            functions.append(self.funcdef())
        prog = ast.Program(tuple(functions))
        _validate(prog)
        return prog

    def funcdef(self) -> ast.FuncDef:
        start = self.expect("func")
        name = self.expect("IDENT", "function name")
        self.expect("(")
        params = []
        if not self.at(")"):
            params.append(self.param())
            while self.accept(","):
                params.append(self.param())
        self.expect(")")
        return_dtype = None
        if self.accept("->"):
            return_dtype = self.dtype()
        body = self.block()
        return ast.FuncDef(name.text, tuple(params), return_dtype, body, self.span_from(start))

    def param(self) -> ast.Param:
        name = self.expect("IDENT", "parameter name")
        self.expect(":")
        dtype = self.dtype()
        return ast.Param(name.text, dtype, ast.Span(name.line, name.column, name.length))

    def dtype(self) -> str:
        if self.current.kind in ast.DTYPES:
            return self.advance().text
        raise self.fail(list(ast.DTYPES))

    def block(self) -> ast.Block:
        start = self.expect("{")
        statements = []
        while not self.at("}"):
            if self.at("EOF"):
                raise self.fail(["}"])
            statements.append(self.statement())
        self.expect("}")
        return ast.Block(tuple(statements), self.span_from(start))

    def statement(self) -> ast.Stmt:
        start = self.current
        kind = start.kind
        if kind == "let":
            self.advance()
            name = self.expect("IDENT", "variable name")
            self.expect("=")
            value = self.expression()
            self.expect(";")
            return ast.Let(name.text, value, self.span_from(start))
        if kind == "if":
            self.advance()
            cond = self.expression()
            then = self.block()
            orelse = self.block() if self.accept("else") else None
            return ast.If(cond, then, orelse, self.span_from(start))
        if kind == "while":
            self.advance()
            cond = self.expression()
            body = self.block()
            return ast.While(cond, body, self.span_from(start))
        if kind == "for":
            self.advance()
            var = self.expect("IDENT", "loop variable")
            self.expect("in")
            self.expect("range")
            self.expect("(")
            lo = self.expression()
            self.expect(",")
            hi = self.expression()
            self.expect(")")
            body = self.block()
            return ast.ForRange(var.text, lo, hi, body, self.span_from(start))
        if kind == "return":
            self.advance()
            value = None if self.at(";") else self.expression()
            self.expect(";")
            return ast.Return(value, self.span_from(start))
        if kind == "print":
            self.advance()
            self.expect("(")
            value = self.expression()
            self.expect(")")
            self.expect(";")
            return ast.Print(value, self.span_from(start))
        if kind == "IDENT" and self.peek().kind == "=":
            name = self.advance()
            self.advance()
            value = self.expression()
            self.expect(";")
            return ast.Assign(name.text, value, self.span_from(start))
        expr = self.expression()
        if self.at("=") and isinstance(expr, ast.Index) and isinstance(expr.base, ast.Name):
            self.advance()
            value = self.expression()
            self.expect(";")
            return ast.IndexAssign(expr.base.ident, expr.index, value, self.span_from(start))
        self.expect(";")
        return ast.ExprStmt(expr, self.span_from(start))

    # -- expressions (tightest binding last) ----------------------------

    def expression(self) -> ast.Expr:
        return self.or_expr()

    def _binary_chain(self, sub, ops) -> ast.Expr:
        start = self.current
        left = sub()
        while self.current.kind in ops:
            op = self.advance().text
            right = sub()
            left = ast.Binary(op, left, right, self.span_from(start))
        return left

    def or_expr(self) -> ast.Expr:
        return self._binary_chain(self.and_expr, ("or",))

    def and_expr(self) -> ast.Expr:
        return self._binary_chain(self.not_expr, ("and",))

    def not_expr(self) -> ast.Expr:
        if self.at("not"):
            start = self.advance()
            operand = self.not_expr()
            return ast.Unary("not", operand, self.span_from(start))
        return self.cmp_expr()

    def cmp_expr(self) -> ast.Expr:
        return self._binary_chain(self.add_expr, _CMP_OPS)

    def add_expr(self) -> ast.Expr:
        return self._binary_chain(self.mul_expr, _ADD_OPS)

    def mul_expr(self) -> ast.Expr:
        return self._binary_chain(self.unary_expr, _MUL_OPS)

    def unary_expr(self) -> ast.Expr:
        if self.at("-"):
            start = self.advance()
            operand = self.unary_expr()
            return ast.Unary("-", operand, self.span_from(start))
        return self.postfix_expr()

    def postfix_expr(self) -> ast.Expr:
        start = self.current
        expr = self.primary()
        while self.at("["):
            self.advance()
            index = self.expression()
            self.expect("]")
            expr = ast.Index(expr, index, self.span_from(start))
        return expr

    def primary(self) -> ast.Expr:
        tok = self.current
        if tok.kind == "INT":
            self.advance()
            return ast.IntLit(tok.value, self.span_from(tok))
        if tok.kind == "REAL":
            self.advance()
            return ast.RealLit(tok.value, self.span_from(tok))
        if tok.kind == "STRING":
            self.advance()
            return ast.StrLit(tok.value, self.span_from(tok))
        if tok.kind in ("true", "false"):
            self.advance()
            return ast.BoolLit(tok.kind == "true", self.span_from(tok))
        if tok.kind == "IDENT":
            self.advance()
            if self.at("("):
                self.advance()
                args = []
                if not self.at(")"):
                    args.append(self.expression())
                    while self.accept(","):
                        args.append(self.expression())
                self.expect(")")
                return ast.Call(tok.text, tuple(args), self.span_from(tok))
            return ast.Name(tok.text, self.span_from(tok))
        if tok.kind == "[":
            self.advance()
            items = []
            if not self.at("]"):
                items.append(self.expression())
                while self.accept(","):
                    items.append(self.expression())
            self.expect("]")
            return ast.ListLit(tuple(items), self.span_from(tok))
        if tok.kind == "(":
            self.advance()
            expr = self.expression()
            self.expect(")")
            return expr
        raise self.fail(["expression"])


def _validate(program: ast.Program) -> None:
    """Static checks: unique function names, no builtin shadowing,
    unique params, and no duplicate `let` within one lexical scope."""
    seen_funcs: set[str] = set()
    for func in program.functions:
        if func.name in BUILTINS:
            raise MiniParseError(
                f"function name {func.name!r} shadows a builtin",
                line=func.span.line, column=func.span.column,
                expected=["a non-builtin function name"], found=func.name,
            )
        if func.name in seen_funcs:
            raise MiniParseError(
                f"duplicate function {func.name!r}",
                line=func.span.line, column=func.span.column,
                expected=["a unique function name"], found=func.name,
            )
        seen_funcs.add(func.name)
        param_names: set[str] = set()
        for param in func.params:
            if param.name in param_names:
                raise MiniParseError(
                    f"duplicate parameter {param.name!r}",
                    line=param.span.line, column=param.span.column,
                    expected=["a unique parameter name"], found=param.name,
                )
            param_names.add(param.name)
        _check_scope(func.body, set(param_names))


def _check_scope(block: ast.Block, bound: set[str]) -> None:
    for stmt in block.statements:
        if isinstance(stmt, ast.Let):
            if stmt.name in bound:
                raise MiniParseError(
                    f"{stmt.name!r} is already bound in this scope",
                    line=stmt.span.line, column=stmt.span.column,
                    expected=["an unbound variable name"], found=stmt.name,
                )
            bound.add(stmt.name)
        elif isinstance(stmt, ast.If):
            _check_scope(stmt.then, set(bound))
            if stmt.orelse is not None:
                _check_scope(stmt.orelse, set(bound))
        elif isinstance(stmt, ast.While):
            _check_scope(stmt.body, set(bound))
        elif isinstance(stmt, ast.ForRange):
            _check_scope(stmt.body, set(bound) | {stmt.var})


def parse(source: str) -> ast.Program:
    """Parse snippet source into a program tree.

    Raises MiniParseError with (line, column, expected, found) detail.
    """
    return _Parser(source).program()
