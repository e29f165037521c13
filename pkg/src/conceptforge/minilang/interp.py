"""Big-step tree-walking evaluator.

Values are int, real (float), bool, str, and list. Lists are immutable:
index assignment rebinds the variable to an updated copy, `push` and
`swap` return new lists. The only implicit conversion anywhere is
int -> real inside mixed arithmetic and comparisons. Execution is
deterministic and never mutates the tree.
"""

from __future__ import annotations

from typing import Any

from ..errors import MiniRuntimeError, StepLimitExceededError
from . import ast
from .printer import _format_real

DEFAULT_STEP_LIMIT = 1_000_000

Value = Any  # int | float | bool | str | list


def dtype_of(value: Value) -> str:
    if isinstance(value, bool):
        return "bool"
    if isinstance(value, int):
        return "int"
    if isinstance(value, float):
        return "real"
    if isinstance(value, str):
        return "str"
    if isinstance(value, list):
        return "list"
    raise TypeError(f"not a snippet-language value: {value!r}")


def render_value(value: Value) -> str:
    """Literal form: what a value looks like written in source."""
    dtype = dtype_of(value)
    if dtype == "int":
        return str(value)
    if dtype == "real":
        return _format_real(value)
    if dtype == "bool":
        return "true" if value else "false"
    if dtype == "str":
        escaped = value.replace("\\", "\\\\").replace('"', '\\"')
        escaped = escaped.replace("\n", "\\n").replace("\t", "\\t")
        return f'"{escaped}"'
    return "[" + ", ".join(render_value(item) for item in value) + "]"


def display_value(value: Value) -> str:
    """What `print` writes: strings raw, everything else in literal form."""
    if isinstance(value, str):
        return value
    return render_value(value)


def _err(kind: str, message: str, span: ast.Span) -> MiniRuntimeError:
    return MiniRuntimeError(message, kind=kind, line=span.line,
                            column=span.column, length=span.length)


class _Return(Exception):
    def __init__(self, value: Value | None):
        self.value = value


class _Scope:
    """Chained lexical scope; assignment rebinds in the defining scope."""

    __slots__ = ("vars", "parent")

    def __init__(self, parent: _Scope | None = None):
        self.vars: dict[str, Value] = {}
        self.parent = parent

    def lookup(self, name: str) -> _Scope | None:
        scope: _Scope | None = self
        while scope is not None:
            if name in scope.vars:
                return scope
            scope = scope.parent
        return None


class _Interp:
    def __init__(self, program: ast.Program, step_limit: int):
        self.functions = {f.name: f for f in program.functions}
        self.step_limit = step_limit
        self.steps = 0
        self.out: list[str] = []

    # -- statements ------------------------------------------------------

    def run_block(self, block: ast.Block, scope: _Scope) -> None:
        inner = _Scope(scope)
        for stmt in block.statements:
            self.run_stmt(stmt, inner)

    def _tick(self) -> None:
        self.steps += 1
        if self.steps > self.step_limit:
            raise StepLimitExceededError(
                f"step limit of {self.step_limit} statement executions exceeded",
                step_limit=self.step_limit,
            )

    def run_stmt(self, stmt: ast.Stmt, scope: _Scope) -> None:
        self._tick()
        if isinstance(stmt, ast.Let):
            scope.vars[stmt.name] = self.eval(stmt.value, scope)
        elif isinstance(stmt, ast.Assign):
            value = self.eval(stmt.value, scope)
            holder = scope.lookup(stmt.name)
            if holder is None:
                raise _err("UndefinedName", f"assignment to unbound variable {stmt.name!r}", stmt.span)
            holder.vars[stmt.name] = value
        elif isinstance(stmt, ast.IndexAssign):
            holder = scope.lookup(stmt.name)
            if holder is None:
                raise _err("UndefinedName", f"index assignment to unbound variable {stmt.name!r}", stmt.span)
            target = holder.vars[stmt.name]
            if not isinstance(target, list):
                raise _err("TypeMismatch",
                           f"cannot index-assign into {dtype_of(target)} value {stmt.name!r}", stmt.span)
            index = self.eval(stmt.index, scope)
            if dtype_of(index) != "int":
                raise _err("TypeMismatch", f"list index must be int, got {dtype_of(index)}", stmt.span)
            if index < 0 or index >= len(target):
                raise _err("IndexOutOfBounds",
                           f"index {index} out of bounds for list of length {len(target)}", stmt.span)
            value = self.eval(stmt.value, scope)
            updated = list(target)
            updated[index] = value
            holder.vars[stmt.name] = updated
        elif isinstance(stmt, ast.If):
            cond = self.eval(stmt.cond, scope)
            if dtype_of(cond) != "bool":
                raise _err("TypeMismatch", f"if condition must be bool, got {dtype_of(cond)}", stmt.span)
            if cond:
                self.run_block(stmt.then, scope)
            elif stmt.orelse is not None:
                self.run_block(stmt.orelse, scope)
        elif isinstance(stmt, ast.While):
            while True:
                cond = self.eval(stmt.cond, scope)
                if dtype_of(cond) != "bool":
                    raise _err("TypeMismatch", f"while condition must be bool, got {dtype_of(cond)}", stmt.span)
                if not cond:
                    break
                self.run_block(stmt.body, scope)
                self._tick()  # the loop head re-executes; bounds empty bodies too
        elif isinstance(stmt, ast.ForRange):
            start = self.eval(stmt.start, scope)
            stop = self.eval(stmt.stop, scope)
            for bound, value in (("start", start), ("stop", stop)):
                if dtype_of(value) != "int":
                    raise _err("TypeMismatch",
                               f"range {bound} must be int, got {dtype_of(value)}", stmt.span)
            for i in range(start, stop):
                self._tick()  # one step per iteration, independent of body size
                body_scope = _Scope(scope)
                body_scope.vars[stmt.var] = i
                for inner in stmt.body.statements:
                    self.run_stmt(inner, body_scope)
        elif isinstance(stmt, ast.Return):
            raise _Return(None if stmt.value is None else self.eval(stmt.value, scope))
        elif isinstance(stmt, ast.Print):
            self.out.append(display_value(self.eval(stmt.value, scope)))
            self.out.append("\n")
        elif isinstance(stmt, ast.ExprStmt):
            self.eval(stmt.value, scope)
        else:
            raise TypeError(f"unknown statement node: {stmt!r}")

    # -- expressions -----------------------------------------------------

    def eval(self, expr: ast.Expr, scope: _Scope) -> Value:
        if isinstance(expr, (ast.IntLit, ast.RealLit, ast.BoolLit, ast.StrLit)):
            return expr.value
        if isinstance(expr, ast.Name):
            holder = scope.lookup(expr.ident)
            if holder is None:
                raise _err("UndefinedName", f"undefined variable {expr.ident!r}", expr.span)
            return holder.vars[expr.ident]
        if isinstance(expr, ast.ListLit):
            return [self.eval(item, scope) for item in expr.items]
        if isinstance(expr, ast.Unary):
            return self._unary(expr, scope)
        if isinstance(expr, ast.Binary):
            return self._binary(expr, scope)
        if isinstance(expr, ast.Index):
            base = self.eval(expr.base, scope)
            if not isinstance(base, list):
                raise _err("TypeMismatch", f"cannot index {dtype_of(base)} value", expr.span)
            index = self.eval(expr.index, scope)
            if dtype_of(index) != "int":
                raise _err("TypeMismatch", f"list index must be int, got {dtype_of(index)}", expr.span)
            if index < 0 or index >= len(base):
                raise _err("IndexOutOfBounds",
                           f"index {index} out of bounds for list of length {len(base)}", expr.span)
            return base[index]
        if isinstance(expr, ast.Call):
            return self._call(expr, scope)
        raise TypeError(f"unknown expression node: {expr!r}")

    def _unary(self, expr: ast.Unary, scope: _Scope) -> Value:
        value = self.eval(expr.operand, scope)
        if expr.op == "not":
            if dtype_of(value) != "bool":
                raise _err("TypeMismatch", f"'not' needs bool, got {dtype_of(value)}", expr.span)
            return not value
        if dtype_of(value) not in ("int", "real"):
            raise _err("TypeMismatch", f"unary '-' needs a number, got {dtype_of(value)}", expr.span)
        return -value

    def _binary(self, expr: ast.Binary, scope: _Scope) -> Value:
        op = expr.op
        if op in ("and", "or"):
            left = self.eval(expr.left, scope)
            if dtype_of(left) != "bool":
                raise _err("TypeMismatch", f"{op!r} needs bool operands, got {dtype_of(left)}", expr.span)
            if op == "and" and not left:
                return False
            if op == "or" and left:
                return True
            right = self.eval(expr.right, scope)
            if dtype_of(right) != "bool":
                raise _err("TypeMismatch", f"{op!r} needs bool operands, got {dtype_of(right)}", expr.span)
            return right

        left = self.eval(expr.left, scope)
        right = self.eval(expr.right, scope)
        lt, rt = dtype_of(left), dtype_of(right)
        numeric = lt in ("int", "real") and rt in ("int", "real")

        if op in ("==", "!="):
            result = self._equal(left, right, expr.span)
            return result if op == "==" else not result
        if op in ("<", "<=", ">", ">="):
            if not (numeric or (lt == "str" and rt == "str")):
                raise _err("TypeMismatch", f"cannot order {lt} against {rt}", expr.span)
            if op == "<":
                return left < right
            if op == "<=":
                return left <= right
            if op == ">":
                return left > right
            return left >= right
        if op == "+":
            if lt == "str" and rt == "str":
                return left + right
            if not numeric:
                raise _err("TypeMismatch", f"cannot add {lt} and {rt}", expr.span)
            return left + right
        if op in ("-", "*"):
            if not numeric:
                raise _err("TypeMismatch", f"cannot apply {op!r} to {lt} and {rt}", expr.span)
            return left - right if op == "-" else left * right
        if op == "/":
            if not numeric:
                raise _err("TypeMismatch", f"cannot divide {lt} by {rt}", expr.span)
            if right == 0:
                raise _err("DivisionByZero", "division by zero", expr.span)
            if lt == "int" and rt == "int":
                return left // right
            return left / right
        if op == "%":
            if lt != "int" or rt != "int":
                raise _err("TypeMismatch", f"'%' needs int operands, got {lt} and {rt}", expr.span)
            if right == 0:
                raise _err("DivisionByZero", "modulo by zero", expr.span)
            return left % right
        raise TypeError(f"unknown operator {op!r}")

    def _equal(self, left: Value, right: Value, span: ast.Span) -> bool:
        lt, rt = dtype_of(left), dtype_of(right)
        if lt in ("int", "real") and rt in ("int", "real"):
            return left == right
        if lt != rt:
            raise _err("TypeMismatch", f"cannot compare {lt} against {rt}", span)
        if lt == "list":
            if len(left) != len(right):
                return False
            return all(self._equal(a, b, span) for a, b in zip(left, right))
        return left == right

    # -- calls -------------------------------------------------------------

    def _call(self, expr: ast.Call, scope: _Scope) -> Value:
        args = [self.eval(arg, scope) for arg in expr.args]
        if expr.func == "len":
            self._check_builtin_args(expr, args, ("list",))
            return len(args[0])
        if expr.func == "push":
            if len(args) != 2 or dtype_of(args[0]) != "list":
                raise _err("TypeMismatch", "push(xs, v) needs a list and a value", expr.span)
            return [*args[0], args[1]]
        if expr.func == "swap":
            self._check_builtin_args(expr, args, ("list", "int", "int"))
            xs, i, j = args
            for idx in (i, j):
                if idx < 0 or idx >= len(xs):
                    raise _err("IndexOutOfBounds",
                               f"index {idx} out of bounds for list of length {len(xs)}", expr.span)
            updated = list(xs)
            updated[i], updated[j] = updated[j], updated[i]
            return updated

        func = self.functions.get(expr.func)
        if func is None:
            raise _err("UndefinedName", f"call to undefined function {expr.func!r}", expr.span)
        if len(args) != len(func.params):
            raise _err("TypeMismatch",
                       f"{expr.func} expects {len(func.params)} argument(s), got {len(args)}",
                       expr.span)
        frame = _Scope()
        for param, arg in zip(func.params, args):
            if dtype_of(arg) != param.dtype:
                raise _err("TypeMismatch",
                           f"{expr.func} parameter {param.name!r} needs {param.dtype}, "
                           f"got {dtype_of(arg)}", expr.span)
            frame.vars[param.name] = arg
        result = self._run_function(func, frame)
        if result is None and func.return_dtype is not None:
            raise _err("TypeMismatch",
                       f"{expr.func} declares a result but returned none", expr.span)
        return result

    def _check_builtin_args(self, expr: ast.Call, args: list[Value], dtypes: tuple[str, ...]) -> None:
        if len(args) != len(dtypes) or any(dtype_of(a) != d for a, d in zip(args, dtypes)):
            sig = ", ".join(dtypes)
            raise _err("TypeMismatch", f"{expr.func}({sig}) called with wrong arguments", expr.span)

    def _run_function(self, func: ast.FuncDef, frame: _Scope) -> Value | None:
        try:
            self.run_block(func.body, frame)
        except _Return as ret:
            return ret.value
        return None


def evaluate(program: ast.Program, entry: str, args: list[Value],
             step_limit: int = DEFAULT_STEP_LIMIT) -> tuple[Value | None, str]:
    """Run `entry` on `args`; returns (result, captured print output).

    Raises MiniRuntimeError (TypeMismatch / IndexOutOfBounds / UndefinedName /
    DivisionByZero, each with a source span) or StepLimitExceededError.
    """
    interp = _Interp(program, step_limit)
    func = interp.functions.get(entry)
    if func is None:
        raise MiniRuntimeError(f"entry function {entry!r} not found",
                               kind="UndefinedName", line=1, column=1, length=0)
    if len(args) != len(func.params):
        raise MiniRuntimeError(
            f"{entry} expects {len(func.params)} argument(s), got {len(args)}",
            kind="TypeMismatch", line=func.span.line, column=func.span.column,
            length=func.span.length)
    frame = _Scope()
    for param, arg in zip(func.params, args):
        if dtype_of(arg) != param.dtype:
            raise MiniRuntimeError(
                f"{entry} parameter {param.name!r} needs {param.dtype}, got {dtype_of(arg)}",
                kind="TypeMismatch", line=func.span.line, column=func.span.column,
                length=func.span.length)
        frame.vars[param.name] = arg
    result = interp._run_function(func, frame)
    return result, "".join(interp.out)
