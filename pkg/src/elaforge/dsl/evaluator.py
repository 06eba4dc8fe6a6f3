"""Deterministic evaluation of typed candidates.

Evaluation is total on finite inputs: log of a non-positive value, sqrt of
a negative, division by zero, and 0 raised to a negative power all produce
non-finite markers (NaN/inf) instead of raising.  The only hard error is a
dimension mismatch against the program's dim_hint.
"""

from __future__ import annotations

import numpy as np

from dataclasses import dataclass

from .nodes import (
    BinOp,
    Call,
    Element,
    EvalError,
    Expr,
    Literal,
    NameRef,
    Neg,
    TypedProgram,
    VectorVar,
)


@dataclass(frozen=True)
class EvalReport:
    """Batch evaluation result: one value per input point."""

    values: np.ndarray
    finite: np.ndarray
    valid: bool


def evaluate(typed: TypedProgram, point: np.ndarray) -> float:
    """Evaluate at a single point; returns a float (possibly NaN/inf)."""
    point = np.asarray(point, dtype=float)
    if point.ndim != 1:
        raise EvalError(f"point must be 1-D, got shape {point.shape}")
    return float(evaluate_batch(typed, point[None, :]).values[0])


def evaluate_batch(typed: TypedProgram, points: np.ndarray) -> EvalReport:
    """Evaluate at every row of an (n, D) matrix."""
    points = np.asarray(points, dtype=float)
    if points.ndim != 2:
        raise EvalError(f"points must be an (n, D) matrix, got shape {points.shape}")
    dim = points.shape[1]
    if typed.dim_hint is not None and dim < typed.dim_hint:
        raise EvalError(
            f"program needs at least {typed.dim_hint} dimensions, got {dim}"
        )

    program = typed.program
    with np.errstate(all="ignore"):
        env: dict[str, tuple[np.ndarray, bool]] = {}
        for name, expr in program.body:
            env[name] = _eval(expr, points, env)
        values, is_vector = _eval(program.result, points, env)
    assert not is_vector
    values = np.asarray(values, dtype=float)
    finite = np.isfinite(values)
    return EvalReport(values=values, finite=finite, valid=bool(finite.all()))


def as_callable(typed: TypedProgram):
    """Adapt a typed program to a plain point -> float objective."""
    return lambda x: evaluate(typed, np.asarray(x, dtype=float))


def _broadcast(a: np.ndarray, a_vec: bool, b: np.ndarray, b_vec: bool):
    # scalar lanes are (n,), vector lanes (n, D); lift the scalar side
    if a_vec == b_vec:
        return a, b, a_vec
    if a_vec:
        return a, b[:, None], True
    return a[:, None], b, True


def _eval(
    expr: Expr, points: np.ndarray, env: dict[str, tuple[np.ndarray, bool]]
) -> tuple[np.ndarray, bool]:
    n = points.shape[0]

    if isinstance(expr, Literal):
        return np.full(n, expr.value), False
    if isinstance(expr, VectorVar):
        return points, True
    if isinstance(expr, NameRef):
        return env[expr.name]
    if isinstance(expr, Element):
        base, _ = _eval(expr.base, points, env)
        if expr.index >= base.shape[1]:
            raise EvalError(f"index {expr.index} out of range for dimension {base.shape[1]}")
        return base[:, expr.index], False
    if isinstance(expr, Neg):
        value, is_vec = _eval(expr.operand, points, env)
        return -value, is_vec
    if isinstance(expr, BinOp):
        left, lv = _eval(expr.left, points, env)
        right, rv = _eval(expr.right, points, env)
        a, b, is_vec = _broadcast(left, lv, right, rv)
        if expr.op == "+":
            return a + b, is_vec
        if expr.op == "-":
            return a - b, is_vec
        if expr.op == "*":
            return a * b, is_vec
        if expr.op == "/":
            return a / b, is_vec
        return np.power(a, b), is_vec
    if isinstance(expr, Call):
        args = [_eval(a, points, env) for a in expr.args]
        return _call(expr.fn, args)
    raise EvalError(f"unreachable node {expr!r}")


_ELEMENTWISE = {
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "tanh": np.tanh,
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
    "abs": np.abs,
    "floor": np.floor,
}

_REDUCTIONS = {
    "sum": lambda v: np.sum(v, axis=1),
    "prod": lambda v: np.prod(v, axis=1),
    "mean": lambda v: np.mean(v, axis=1),
    "norm2": lambda v: np.sqrt(np.sum(v * v, axis=1)),
}


def _call(fn: str, args: list[tuple[np.ndarray, bool]]) -> tuple[np.ndarray, bool]:
    if fn in _ELEMENTWISE:
        value, is_vec = args[0]
        return _ELEMENTWISE[fn](value), is_vec
    if fn in _REDUCTIONS:
        value, _ = args[0]
        return _REDUCTIONS[fn](value), False
    # min/max: 1-ary reduction or 2-ary scalar form
    if len(args) == 1:
        value, _ = args[0]
        op = np.min if fn == "min" else np.max
        return op(value, axis=1), False
    (a, _), (b, _) = args
    op = np.minimum if fn == "min" else np.maximum
    return op(a, b), False
