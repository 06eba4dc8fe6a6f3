"""Render programs back to source text.

Two dialects: ``dsl`` is the minimal surface syntax that round-trips
through parse(); ``numpy-text`` is a standalone Python function with the
import line and np-prefixed calls, suitable for sharing as a .fn file.
"""

from __future__ import annotations

from .nodes import (
    BinOp,
    Call,
    Element,
    Expr,
    Literal,
    NameRef,
    Neg,
    Program,
    VectorVar,
)

DIALECTS = ("dsl", "numpy-text")

# operator precedence; higher binds tighter
_PREC_ADD = 10
_PREC_MUL = 20
_PREC_NEG = 30
_PREC_POW = 40
_PREC_ATOM = 100

_NUMPY_NAMES = {
    "sin": "np.sin", "cos": "np.cos", "tan": "np.tan", "tanh": "np.tanh",
    "exp": "np.exp", "log": "np.log", "sqrt": "np.sqrt", "floor": "np.floor",
    "abs": "np.abs",
    "sum": "np.sum", "prod": "np.prod", "mean": "np.mean",
    "norm2": "np.linalg.norm",
}


def render(program: Program, dialect: str = "dsl") -> str:
    """Render a program; the dsl dialect parses back to an equal program."""
    if dialect not in DIALECTS:
        raise ValueError(f"unknown dialect {dialect!r} (expected one of {DIALECTS})")
    numpy_style = dialect == "numpy-text"

    lines: list[str] = []
    if numpy_style:
        lines.append("import numpy as np")
        lines.append("")
        lines.append(f"def {program.name}(x: np.ndarray) -> float:")
    else:
        lines.append(f"def {program.name}(x):")
    for name, expr in program.body:
        lines.append(f"    {name} = {_render_expr(expr, numpy_style)}")
    lines.append(f"    return {_render_expr(program.result, numpy_style)}")
    return "\n".join(lines) + "\n"


def render_literal(value: float) -> str:
    text = repr(value)
    return text


def _fn_text(fn: str, numpy_style: bool) -> str:
    if not numpy_style:
        return fn
    if fn in ("min", "max"):
        return fn  # resolved per-arity at the call site
    return _NUMPY_NAMES[fn]


def _render_expr(expr: Expr, numpy_style: bool) -> str:
    text, _ = _render(expr, numpy_style)
    return text


def _render(expr: Expr, numpy_style: bool) -> tuple[str, int]:
    if isinstance(expr, Literal):
        if expr.value < 0:
            return f"-{render_literal(-expr.value)}", _PREC_NEG
        return render_literal(expr.value), _PREC_ATOM
    if isinstance(expr, VectorVar):
        return "x", _PREC_ATOM
    if isinstance(expr, NameRef):
        return expr.name, _PREC_ATOM
    if isinstance(expr, Element):
        base, prec = _render(expr.base, numpy_style)
        if prec < _PREC_ATOM:
            base = f"({base})"
        return f"{base}[{expr.index}]", _PREC_ATOM
    if isinstance(expr, Neg):
        inner, prec = _render(expr.operand, numpy_style)
        #-a**b would rebind as -(a**b); everything else below NEG needs parens
        if prec < _PREC_NEG:
            inner = f"({inner})"
        return f"-{inner}", _PREC_NEG
    if isinstance(expr, BinOp):
        left, lp = _render(expr.left, numpy_style)
        right, rp = _render(expr.right, numpy_style)
        if expr.op in ("+", "-"):
            mine = _PREC_ADD
            if lp < mine:
                left = f"({left})"
            if rp < mine or (expr.op == "-" and rp == mine):
                right = f"({right})"
        elif expr.op in ("*", "/"):
            mine = _PREC_MUL
            if lp < mine:
                left = f"({left})"
            if rp < mine or (expr.op == "/" and rp == mine):
                right = f"({right})"
        else:  # '**' is right-associative and binds tighter than unary minus
            mine = _PREC_POW
            if lp <= mine:
                left = f"({left})"
            if rp < mine:
                right = f"({right})"
        return f"{left} {expr.op} {right}", mine
    if isinstance(expr, Call):
        args = ", ".join(_render_expr(a, numpy_style) for a in expr.args)
        name = _fn_text(expr.fn, numpy_style)
        if numpy_style and expr.fn in ("min", "max") and len(expr.args) == 1:
            name = f"np.{expr.fn}"
        return f"{name}({args})", _PREC_ATOM
    raise AssertionError(f"unreachable node {expr!r}")
