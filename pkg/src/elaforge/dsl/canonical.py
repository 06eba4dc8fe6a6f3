"""Canonical normal form and stable hashing for candidate programs.

Assignments are inlined into one result expression, associative chains of
+ and * are flattened with their operands sorted structurally, and literals
print with 17 significant digits.  Two programs that differ only in binding
names, binding order, or commutative operand order share one normal form.
"""

from __future__ import annotations

import hashlib

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


def canonicalize(program: Program) -> tuple[str, str]:
    """Return (canonical text, 64-bit hex hash) for a parsed program."""
    inlined = inline(program)
    # inlining shares subtrees, so memoize by object identity to keep the
    # text pass linear in the number of distinct nodes
    text = _canon_text(inlined, {})
    digest = hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]
    return text, digest


def canonical_hash(program: Program) -> str:
    return canonicalize(program)[1]


def inline(program: Program) -> Expr:
    """Substitute every name binding into the result expression."""
    env: dict[str, Expr] = {}
    for name, expr in program.body:
        env[name] = _subst(expr, env)
    return _subst(program.result, env)


def _subst(expr: Expr, env: dict[str, Expr]) -> Expr:
    if isinstance(expr, NameRef):
        return env[expr.name]
    if isinstance(expr, Element):
        return Element(_subst(expr.base, env), expr.index)
    if isinstance(expr, Neg):
        return Neg(_subst(expr.operand, env))
    if isinstance(expr, BinOp):
        return BinOp(expr.op, _subst(expr.left, env), _subst(expr.right, env))
    if isinstance(expr, Call):
        return Call(expr.fn, tuple(_subst(a, env) for a in expr.args))
    return expr


def _literal(value: float) -> str:
    return format(value, ".17g")


def _canon_text(expr: Expr, memo: dict[int, str]) -> str:
    key = id(expr)
    cached = memo.get(key)
    if cached is not None:
        return cached
    if isinstance(expr, Literal):
        text = f"(lit {_literal(expr.value)})"
    elif isinstance(expr, VectorVar):
        text = "(x)"
    elif isinstance(expr, Element):
        text = f"(idx {_canon_text(expr.base, memo)} {expr.index})"
    elif isinstance(expr, Neg):
        # collapse negation chains and fold negated literals so hand-built
        # trees match parser output (IEEE negation is exactly involutive)
        inner: Expr = expr
        flips = 0
        while isinstance(inner, Neg):
            inner = inner.operand
            flips ^= 1
        if isinstance(inner, Literal):
            value = -inner.value if flips else inner.value
            text = f"(lit {_literal(value)})"
        elif flips == 0:
            text = _canon_text(inner, memo)
        else:
            text = f"(neg {_canon_text(inner, memo)})"
    elif isinstance(expr, BinOp):
        if expr.op in ("+", "*"):
            parts = sorted(_canon_text(t, memo) for t in _flatten(expr, expr.op))
            tag = "add" if expr.op == "+" else "mul"
            text = f"({tag} {' '.join(parts)})"
        else:
            tag = {"-": "sub", "/": "div", "**": "pow"}[expr.op]
            text = f"({tag} {_canon_text(expr.left, memo)} {_canon_text(expr.right, memo)})"
    elif isinstance(expr, Call):
        args = " ".join(_canon_text(a, memo) for a in expr.args)
        text = f"({expr.fn} {args})"
    else:
        raise AssertionError(f"unreachable node {expr!r}")
    memo[key] = text
    return text


def _flatten(expr: Expr, op: str) -> list[Expr]:
    if isinstance(expr, BinOp) and expr.op == op:
        return _flatten(expr.left, op) + _flatten(expr.right, op)
    return [expr]
