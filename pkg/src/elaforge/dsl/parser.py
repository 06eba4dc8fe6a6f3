"""Parser for the candidate-function language.

Source text is the body of one fenced code block: an optional
``import numpy as np`` line plus a single function definition whose body is
a chain of single assignments ending in ``return``.  Python's ``ast`` module
does the lexing; this module walks the tree and rejects everything outside
the restricted grammar.
"""

from __future__ import annotations

import ast
import math

from .nodes import (
    BinOp,
    Call,
    Element,
    Expr,
    Literal,
    NameRef,
    Neg,
    ParseError,
    Program,
    VectorVar,
    WHITELIST_FNS,
)

# Recognized spellings for each whitelisted function.  Bare names and their
# numpy-prefixed forms both map to one canonical name, so unmodified
# LLM-style numpy code parses as-is.
_FN_ALIASES = {
    "sin": "sin", "cos": "cos", "tan": "tan", "tanh": "tanh",
    "exp": "exp", "log": "log", "sqrt": "sqrt", "floor": "floor",
    "abs": "abs", "absolute": "abs",
    "min": "min", "max": "max", "minimum": "min", "maximum": "max",
    "fmin": "min", "fmax": "max",
    "sum": "sum", "prod": "prod", "product": "prod", "mean": "mean",
    "norm2": "norm2",
}

# numpy constants folded to literals
_CONSTANTS = {"pi": math.pi, "e": math.e}

_BINOPS = {
    ast.Add: "+",
    ast.Sub: "-",
    ast.Mult: "*",
    ast.Div: "/",
    ast.Pow: "**",
}


def _err(reason: str, node: ast.AST | None = None) -> ParseError:
    line = getattr(node, "lineno", None)
    col = getattr(node, "col_offset", None)
    return ParseError(reason, line, col)


def _is_numpy_import(stmt: ast.stmt) -> bool:
    return (
        isinstance(stmt, ast.Import)
        and len(stmt.names) == 1
        and stmt.names[0].name == "numpy"
    )


def parse(source_text: str) -> Program:
    """Parse candidate source into a Program.

    Raises ParseError for any construct outside the grammar: loops,
    conditionals, non-numpy imports, calls outside the whitelist,
    reassignment, missing return.
    """
    try:
        module = ast.parse(source_text)
    except SyntaxError as exc:
        raise ParseError(f"invalid syntax: {exc.msg}", exc.lineno, exc.offset) from None
    except ValueError as exc:  # e.g. null bytes in the source
        raise ParseError(f"invalid source: {exc}") from None
    except RecursionError:
        raise ParseError("expression nested too deeply") from None

    func: ast.FunctionDef | None = None
    for stmt in module.body:
        if _is_numpy_import(stmt):
            if stmt.names[0].asname not in (None, "np"):  # type: ignore[union-attr]
                raise _err("numpy must be imported as np", stmt)
            continue
        if isinstance(stmt, (ast.Import, ast.ImportFrom)):
            raise _err("disallowed import", stmt)
        if isinstance(stmt, ast.FunctionDef):
            if func is not None:
                raise _err("more than one function definition", stmt)
            func = stmt
            continue
        raise _err(f"disallowed top-level statement: {type(stmt).__name__}", stmt)

    if func is None:
        raise ParseError("no function definition found")

    args = func.args
    if (
        args.posonlyargs
        or args.kwonlyargs
        or args.vararg
        or args.kwarg
        or len(args.args) != 1
    ):
        raise _err("function must take exactly one positional argument", func)
    param = args.args[0].arg

    body = list(func.body)
    # optional docstring
    if body and isinstance(body[0], ast.Expr) and isinstance(body[0].value, ast.Constant) \
            and isinstance(body[0].value.value, str):
        body = body[1:]

    assigned: list[tuple[str, Expr]] = []
    names: set[str] = set()
    result: Expr | None = None

    for stmt in body:
        if result is not None:
            raise _err("statements after return", stmt)
        if _is_numpy_import(stmt):
            continue
        if isinstance(stmt, (ast.Import, ast.ImportFrom)):
            raise _err("disallowed import", stmt)
        if isinstance(stmt, ast.Assign):
            if len(stmt.targets) != 1 or not isinstance(stmt.targets[0], ast.Name):
                raise _err("assignment target must be a single name", stmt)
            target = stmt.targets[0].id
            if target == param or target in names:
                raise _err(f"reassignment of {target!r}", stmt)
            expr = _convert(stmt.value, param, names)
            assigned.append((target, expr))
            names.add(target)
        elif isinstance(stmt, ast.AnnAssign):
            raise _err("annotated assignment not allowed", stmt)
        elif isinstance(stmt, ast.AugAssign):
            raise _err("augmented assignment (reassignment) not allowed", stmt)
        elif isinstance(stmt, ast.Return):
            if stmt.value is None:
                raise _err("return must carry an expression", stmt)
            result = _convert(stmt.value, param, names)
        elif isinstance(stmt, (ast.For, ast.While)):
            raise _err("loops not allowed", stmt)
        elif isinstance(stmt, ast.If):
            raise _err("conditionals not allowed", stmt)
        else:
            raise _err(f"disallowed statement: {type(stmt).__name__}", stmt)

    if result is None:
        raise ParseError("missing return statement")

    return Program(
        name=func.name,
        body=tuple(assigned),
        result=result,
        source_text=source_text,
    )


def _np_path(node: ast.expr) -> str | None:
    """Dotted name under the np/numpy prefix, e.g. 'np.linalg.norm' -> 'linalg.norm'."""
    parts: list[str] = []
    while isinstance(node, ast.Attribute):
        parts.append(node.attr)
        node = node.value
    if isinstance(node, ast.Name) and node.id in ("np", "numpy"):
        return ".".join(reversed(parts))
    return None


def _fn_name(node: ast.expr) -> str | None:
    """Canonical whitelist name for a callee expression, or None."""
    if isinstance(node, ast.Name):
        return _FN_ALIASES.get(node.id)
    path = _np_path(node)
    if path is not None:
        if path == "linalg.norm":
            return "norm2"
        if "." not in path:
            return _FN_ALIASES.get(path)
    return None


def _convert(node: ast.expr, param: str, names: set[str]) -> Expr:
    if isinstance(node, ast.Constant):
        value = node.value
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise _err(f"literal must be numeric, got {value!r}", node)
        value = float(value)
        if not math.isfinite(value):
            raise _err("non-finite literal", node)
        return Literal(value)

    if isinstance(node, ast.Name):
        if node.id == param:
            return VectorVar()
        if node.id in names:
            return NameRef(node.id)
        raise _err(f"unknown name {node.id!r}", node)

    if isinstance(node, ast.Attribute):
        path = _np_path(node)
        if path in _CONSTANTS:
            return Literal(_CONSTANTS[path])
        raise _err("attribute access outside the np. prefix", node)

    if isinstance(node, ast.UnaryOp):
        if isinstance(node.op, ast.USub):
            operand = _convert(node.operand, param, names)
            if isinstance(operand, Literal):
                return Literal(-operand.value)
            return Neg(operand)
        if isinstance(node.op, ast.UAdd):
            return _convert(node.operand, param, names)
        raise _err(f"disallowed unary operator {type(node.op).__name__}", node)

    if isinstance(node, ast.BinOp):
        op = _BINOPS.get(type(node.op))
        if op is None:
            raise _err(f"disallowed operator {type(node.op).__name__}", node)
        return BinOp(op, _convert(node.left, param, names), _convert(node.right, param, names))

    if isinstance(node, ast.Subscript):
        base = node.value
        if isinstance(base, ast.Name) and (base.id == param or base.id in names):
            base_expr = _convert(base, param, names)
        else:
            raise _err("only the input vector or an assigned name may be indexed", node)
        idx = node.slice
        if (
            isinstance(idx, ast.Constant)
            and isinstance(idx.value, int)
            and not isinstance(idx.value, bool)
        ):
            if idx.value < 0:
                raise _err("negative indices not allowed", node)
            return Element(base_expr, int(idx.value))
        raise _err("index must be a non-negative integer literal", node)

    if isinstance(node, ast.Call):
        if node.keywords:
            raise _err("keyword arguments not allowed", node)
        fn = _fn_name(node.func)
        if fn is None or fn not in WHITELIST_FNS:
            raise _err("call outside the function whitelist", node)
        if any(isinstance(a, ast.Starred) for a in node.args):
            raise _err("starred arguments not allowed", node)
        args = tuple(_convert(a, param, names) for a in node.args)
        if fn in ("min", "max"):
            if len(args) not in (1, 2):
                raise _err(f"{fn} takes 1 or 2 arguments", node)
        elif len(args) != 1:
            raise _err(f"{fn} takes exactly 1 argument", node)
        return Call(fn, args)

    raise _err(f"disallowed expression: {type(node).__name__}", node)
