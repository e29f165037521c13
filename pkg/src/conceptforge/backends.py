"""Alternative textual renderings of an emitted program tree.

Both backends walk the same tree the primary emitter builds, keep the
same function set and call order, and report which output line each of
main's statements landed on. They are readable transliterations, not
compilable translations.
"""

from __future__ import annotations

from .minilang import ast
from .minilang.printer import _escape, _format_real

_INDENT = "    "

_BIN_PREC = {
    "or": 1, "and": 2,
    "==": 4, "!=": 4, "<": 4, "<=": 4, ">": 4, ">=": 4,
    "+": 5, "-": 5,
    "*": 6, "/": 6, "%": 6,
}

_C_TYPES = {"int": "int", "real": "double", "bool": "bool",
            "str": "string", "list": "list"}


class _Expr:
    """Precedence-driven expression formatter; subclasses supply the
    boolean keywords."""

    NOT: str
    AND: str
    OR: str
    TRUE: str
    FALSE: str

    def format(self, expr: ast.Expr, min_prec: int = 0) -> str:
        text = self._render(expr)
        if self._prec(expr) < min_prec:
            return f"({text})"
        return text

    def _prec(self, expr: ast.Expr) -> int:
        if isinstance(expr, ast.Binary):
            return _BIN_PREC[expr.op]
        if isinstance(expr, ast.Unary):
            return 3 if expr.op == "not" else 7
        if isinstance(expr, ast.Index):
            return 8
        return 9

    def _render(self, expr: ast.Expr) -> str:
        if isinstance(expr, ast.IntLit):
            return str(expr.value)
        if isinstance(expr, ast.RealLit):
            return _format_real(expr.value)
        if isinstance(expr, ast.BoolLit):
            return self.TRUE if expr.value else self.FALSE
        if isinstance(expr, ast.StrLit):
            return f'"{_escape(expr.value)}"'
        if isinstance(expr, ast.Name):
            return expr.ident
        if isinstance(expr, ast.ListLit):
            items = ", ".join(self.format(i) for i in expr.items)
            return f"[{items}]"
        if isinstance(expr, ast.Unary):
            if expr.op == "not":
                return f"{self.NOT}{self.format(expr.operand, 3)}"
            return f"-{self.format(expr.operand, 8)}"
        if isinstance(expr, ast.Binary):
            op = {"and": self.AND, "or": self.OR}.get(expr.op, expr.op)
            prec = _BIN_PREC[expr.op]
            left = self.format(expr.left, prec)
            right = self.format(expr.right, prec + 1)
            return f"{left} {op} {right}"
        if isinstance(expr, ast.Index):
            return f"{self.format(expr.base, 8)}[{self.format(expr.index)}]"
        if isinstance(expr, ast.Call):
            args = ", ".join(self.format(a) for a in expr.args)
            return f"{expr.func}({args})"
        raise TypeError(f"unknown expression node: {expr!r}")


class _CExpr(_Expr):
    NOT = "!"
    AND = "&&"
    OR = "||"
    TRUE = "true"
    FALSE = "false"


class _PyExpr(_Expr):
    NOT = "not "
    AND = "and"
    OR = "or"
    TRUE = "True"
    FALSE = "False"


def _render_c(program: ast.Program) -> tuple[str, list[int]]:
    fmt = _CExpr()
    lines: list[str] = []
    main_lines: list[int] = []

    def block(b: ast.Block, depth: int, track: bool = False) -> None:
        pad = _INDENT * depth
        for stmt in b.statements:
            if track:
                main_lines.append(len(lines) + 1)
            if isinstance(stmt, ast.Let):
                lines.append(f"{pad}var {stmt.name} = {fmt.format(stmt.value)};")
            elif isinstance(stmt, ast.Assign):
                lines.append(f"{pad}{stmt.name} = {fmt.format(stmt.value)};")
            elif isinstance(stmt, ast.IndexAssign):
                lines.append(f"{pad}{stmt.name}[{fmt.format(stmt.index)}] = "
                             f"{fmt.format(stmt.value)};")
            elif isinstance(stmt, ast.If):
                lines.append(f"{pad}if ({fmt.format(stmt.cond)}) {{")
                block(stmt.then, depth + 1)
                if stmt.orelse is not None:
                    lines.append(f"{pad}}} else {{")
                    block(stmt.orelse, depth + 1)
                lines.append(f"{pad}}}")
            elif isinstance(stmt, ast.While):
                lines.append(f"{pad}while ({fmt.format(stmt.cond)}) {{")
                block(stmt.body, depth + 1)
                lines.append(f"{pad}}}")
            elif isinstance(stmt, ast.ForRange):
                lines.append(
                    f"{pad}for (var {stmt.var} = {fmt.format(stmt.start)}; "
                    f"{stmt.var} < {fmt.format(stmt.stop)}; "
                    f"{stmt.var} = {stmt.var} + 1) {{")
                block(stmt.body, depth + 1)
                lines.append(f"{pad}}}")
            elif isinstance(stmt, ast.Return):
                if stmt.value is None:
                    lines.append(f"{pad}return;")
                else:
                    lines.append(f"{pad}return {fmt.format(stmt.value)};")
            elif isinstance(stmt, ast.Print):
                lines.append(f"{pad}print({fmt.format(stmt.value)});")
            elif isinstance(stmt, ast.ExprStmt):
                lines.append(f"{pad}{fmt.format(stmt.value)};")
            else:
                raise TypeError(f"unknown statement node: {stmt!r}")

    for i, func in enumerate(program.functions):
        if i:
            lines.append("")
        ret = _C_TYPES.get(func.return_dtype, "void") \
            if func.return_dtype is not None else "void"
        params = ", ".join(f"{_C_TYPES[p.dtype]} {p.name}"
                           for p in func.params)
        lines.append(f"{ret} {func.name}({params}) {{")
        block(func.body, 1, track=func.name == "main")
        lines.append("}")
    return "\n".join(lines) + "\n", main_lines


def _render_py(program: ast.Program) -> tuple[str, list[int]]:
    fmt = _PyExpr()
    lines: list[str] = []
    main_lines: list[int] = []

    def block(b: ast.Block, depth: int, track: bool = False) -> None:
        pad = _INDENT * depth
        if not b.statements:
            lines.append(f"{pad}pass")
            return
        for stmt in b.statements:
            if track:
                main_lines.append(len(lines) + 1)
            if isinstance(stmt, ast.Let) or isinstance(stmt, ast.Assign):
                lines.append(f"{pad}{stmt.name} = {fmt.format(stmt.value)}")
            elif isinstance(stmt, ast.IndexAssign):
                lines.append(f"{pad}{stmt.name}[{fmt.format(stmt.index)}] = "
                             f"{fmt.format(stmt.value)}")
            elif isinstance(stmt, ast.If):
                lines.append(f"{pad}if {fmt.format(stmt.cond)}:")
                block(stmt.then, depth + 1)
                if stmt.orelse is not None:
                    lines.append(f"{pad}else:")
                    block(stmt.orelse, depth + 1)
            elif isinstance(stmt, ast.While):
                lines.append(f"{pad}while {fmt.format(stmt.cond)}:")
                block(stmt.body, depth + 1)
            elif isinstance(stmt, ast.ForRange):
                lines.append(f"{pad}for {stmt.var} in "
                             f"range({fmt.format(stmt.start)}, "
                             f"{fmt.format(stmt.stop)}):")
                block(stmt.body, depth + 1)
            elif isinstance(stmt, ast.Return):
                if stmt.value is None:
                    lines.append(f"{pad}return")
                else:
                    lines.append(f"{pad}return {fmt.format(stmt.value)}")
            elif isinstance(stmt, ast.Print):
                lines.append(f"{pad}print({fmt.format(stmt.value)})")
            elif isinstance(stmt, ast.ExprStmt):
                lines.append(f"{pad}{fmt.format(stmt.value)}")
            else:
                raise TypeError(f"unknown statement node: {stmt!r}")

    for i, func in enumerate(program.functions):
        if i:
            lines.append("")
        params = ", ".join(p.name for p in func.params)
        lines.append(f"def {func.name}({params}):")
        block(func.body, 1, track=func.name == "main")
    return "\n".join(lines) + "\n", main_lines


def render(program: ast.Program, backend: str) -> tuple[str, list[int]]:
    """Source text plus the 1-based line of each statement in main."""
    if backend == "c-like":
        return _render_c(program)
    if backend == "py-like":
        return _render_py(program)
    raise ValueError(f"unknown backend {backend!r}")
