"""Static checks for parsed candidates.

Every expression is SCALAR or VECTOR.  Elementwise operations broadcast
scalar against vector, reductions collapse a vector to a scalar, indexing
yields a scalar, and the result expression must be SCALAR.
"""

from __future__ import annotations

from .nodes import (
    BinOp,
    Call,
    ELEMENTWISE_FNS,
    Element,
    Expr,
    Literal,
    MINMAX_FNS,
    NameRef,
    Neg,
    Program,
    REDUCTION_FNS,
    TypecheckError,
    TypedProgram,
    VectorVar,
)

SCALAR = "scalar"
VECTOR = "vector"


def typecheck(program: Program) -> TypedProgram:
    """Validate types and return a TypedProgram with its dimension hint."""
    env: dict[str, str] = {}
    for name, expr in program.body:
        env[name] = _type_of(expr, env)
    result_type = _type_of(program.result, env)
    if result_type != SCALAR:
        raise TypecheckError("result must be scalar, not a vector")

    max_index = _max_index(program)
    dim_hint = None if max_index is None else max_index + 1
    return TypedProgram(program=program, dim_hint=dim_hint)


def _type_of(expr: Expr, env: dict[str, str]) -> str:
    if isinstance(expr, Literal):
        return SCALAR
    if isinstance(expr, VectorVar):
        return VECTOR
    if isinstance(expr, NameRef):
        return env[expr.name]
    if isinstance(expr, Element):
        base = _type_of(expr.base, env)
        if base != VECTOR:
            raise TypecheckError(f"indexing a scalar ({expr.base!r})")
        return SCALAR
    if isinstance(expr, Neg):
        return _type_of(expr.operand, env)
    if isinstance(expr, BinOp):
        left = _type_of(expr.left, env)
        right = _type_of(expr.right, env)
        if expr.op == "**" and right != SCALAR:
            raise TypecheckError("power exponent must be scalar")
        return VECTOR if VECTOR in (left, right) else SCALAR
    if isinstance(expr, Call):
        arg_types = [_type_of(a, env) for a in expr.args]
        if expr.fn in ELEMENTWISE_FNS:
            return arg_types[0]
        if expr.fn in REDUCTION_FNS:
            if arg_types[0] != VECTOR:
                raise TypecheckError(f"{expr.fn} expects a vector argument")
            return SCALAR
        if expr.fn in MINMAX_FNS:
            if len(arg_types) == 1:
                if arg_types[0] != VECTOR:
                    raise TypecheckError(f"1-argument {expr.fn} expects a vector")
                return SCALAR
            if arg_types != [SCALAR, SCALAR]:
                raise TypecheckError(f"2-argument {expr.fn} expects two scalars")
            return SCALAR
    raise TypecheckError(f"unreachable node {expr!r}")


def _max_index(program: Program) -> int | None:
    """Highest coordinate index used anywhere in the program, or None."""
    best: int | None = None

    def walk(expr: Expr) -> None:
        nonlocal best
        if isinstance(expr, Element):
            best = expr.index if best is None else max(best, expr.index)
            walk(expr.base)
        elif isinstance(expr, Neg):
            walk(expr.operand)
        elif isinstance(expr, BinOp):
            walk(expr.left)
            walk(expr.right)
        elif isinstance(expr, Call):
            for a in expr.args:
                walk(a)

    for _, expr in program.body:
        walk(expr)
    walk(program.result)
    return best
