"""Snippet language front end: parser, canonical printer, evaluator."""

from . import ast
from .interp import DEFAULT_STEP_LIMIT, Value, display_value, dtype_of, evaluate, render_value
from .parser import BUILTINS, parse
from .printer import pretty_print

__all__ = [
    "BUILTINS",
    "DEFAULT_STEP_LIMIT",
    "Value",
    "ast",
    "display_value",
    "dtype_of",
    "evaluate",
    "parse",
    "pretty_print",
    "render_value",
]
