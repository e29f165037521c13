"""Canonical source formatter.

One statement per line, 4-space indent, minimal parentheses. Formatting
is idempotent: pretty-printing the parse of pretty-printed output yields
the same text.
"""

from __future__ import annotations

from . import ast

_INDENT = "    "

# Binding strength, loosest to tightest. Primaries sit at 9.
_BIN_PREC = {
    "or": 1, "and": 2,
    "==": 4, "!=": 4, "<": 4, "<=": 4, ">": 4, ">=": 4,
    "+": 5, "-": 5,
    "*": 6, "/": 6, "%": 6,
}


def _prec(expr: ast.Expr) -> int:
    if isinstance(expr, ast.Binary):
        return _BIN_PREC[expr.op]
    if isinstance(expr, ast.Unary):
        return 3 if expr.op == "not" else 7
    if isinstance(expr, ast.Index):
        return 8
    return 9


def _escape(text: str) -> str:
    out = []
    for ch in text:
        if ch == "\\":
            out.append("\\\\")
        elif ch == '"':
            out.append('\\"')
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\t":
            out.append("\\t")
        else:
            out.append(ch)
    return "".join(out)


def _format_real(value: float) -> str:
    text = repr(value)
    if "e" in text or "E" in text or "." not in text:
        text = format(value, ".17f").rstrip("0")
        if text.endswith("."):
            text += "0"
    return text


def format_expr(expr: ast.Expr, min_prec: int = 0) -> str:
    text = _render(expr)
    if _prec(expr) < min_prec:
        return f"({text})"
    return text


def _render(expr: ast.Expr) -> str:
    if isinstance(expr, ast.IntLit):
        return str(expr.value)
    if isinstance(expr, ast.RealLit):
        return _format_real(expr.value)
    if isinstance(expr, ast.BoolLit):
        return "true" if expr.value else "false"
    if isinstance(expr, ast.StrLit):
        return f'"{_escape(expr.value)}"'
    if isinstance(expr, ast.Name):
        return expr.ident
    if isinstance(expr, ast.ListLit):
        return "[" + ", ".join(format_expr(item) for item in expr.items) + "]"
    if isinstance(expr, ast.Unary):
        if expr.op == "not":
            return f"not {format_expr(expr.operand, 3)}"
        return f"-{format_expr(expr.operand, 8)}"
    if isinstance(expr, ast.Binary):
        prec = _BIN_PREC[expr.op]
        left = format_expr(expr.left, prec)
        right = format_expr(expr.right, prec + 1)
        return f"{left} {expr.op} {right}"
    if isinstance(expr, ast.Index):
        return f"{format_expr(expr.base, 8)}[{format_expr(expr.index)}]"
    if isinstance(expr, ast.Call):
        return f"{expr.func}(" + ", ".join(format_expr(a) for a in expr.args) + ")"
    raise TypeError(f"unknown expression node: {expr!r}")


def _format_block(block: ast.Block, depth: int, lines: list[str]) -> None:
    pad = _INDENT * depth
    for stmt in block.statements:
        if isinstance(stmt, ast.Let):
            lines.append(f"{pad}let {stmt.name} = {format_expr(stmt.value)};")
        elif isinstance(stmt, ast.Assign):
            lines.append(f"{pad}{stmt.name} = {format_expr(stmt.value)};")
        elif isinstance(stmt, ast.IndexAssign):
            lines.append(f"{pad}{stmt.name}[{format_expr(stmt.index)}] = {format_expr(stmt.value)};")
        elif isinstance(stmt, ast.If):
            lines.append(f"{pad}if {format_expr(stmt.cond)} {{")
            _format_block(stmt.then, depth + 1, lines)
            if stmt.orelse is not None:
                lines.append(f"{pad}}} else {{")
                _format_block(stmt.orelse, depth + 1, lines)
            lines.append(f"{pad}}}")
        elif isinstance(stmt, ast.While):
            lines.append(f"{pad}while {format_expr(stmt.cond)} {{")
            _format_block(stmt.body, depth + 1, lines)
            lines.append(f"{pad}}}")
        elif isinstance(stmt, ast.ForRange):
            lines.append(f"{pad}for {stmt.var} in range({format_expr(stmt.start)}, "
                         f"{format_expr(stmt.stop)}) {{")
            _format_block(stmt.body, depth + 1, lines)
            lines.append(f"{pad}}}")
        elif isinstance(stmt, ast.Return):
            if stmt.value is None:
                lines.append(f"{pad}return;")
            else:
                lines.append(f"{pad}return {format_expr(stmt.value)};")
        elif isinstance(stmt, ast.Print):
            lines.append(f"{pad}print({format_expr(stmt.value)});")
        elif isinstance(stmt, ast.ExprStmt):
            lines.append(f"{pad}{format_expr(stmt.value)};")
        else:
            raise TypeError(f"unknown statement node: {stmt!r}")


def format_function(func: ast.FuncDef) -> str:
    params = ", ".join(f"{p.name}: {p.dtype}" for p in func.params)
    header = f"func {func.name}({params})"
    if func.return_dtype is not None:
        header += f" -> {func.return_dtype}"
    lines = [header + " {"]
    _format_block(func.body, 1, lines)
    lines.append("}")
    return "\n".join(lines)


def pretty_print(program: ast.Program) -> str:
    """Render a program in canonical form; output re-parses to the same tree."""
    return "\n\n".join(format_function(f) for f in program.functions) + "\n"
