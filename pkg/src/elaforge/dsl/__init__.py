"""Restricted expression language for candidate benchmark functions."""

from .canonical import canonical_hash, canonicalize, inline
from .evaluator import EvalReport, as_callable, evaluate, evaluate_batch
from .nodes import (
    BinOp,
    Call,
    DslError,
    Element,
    EvalError,
    Expr,
    Literal,
    NameRef,
    Neg,
    ParseError,
    Program,
    TypecheckError,
    TypedProgram,
    VectorVar,
    WHITELIST_FNS,
)
from .parser import parse
from .render import DIALECTS, render
from .typecheck import SCALAR, VECTOR, typecheck

__all__ = [
    "BinOp",
    "Call",
    "DIALECTS",
    "DslError",
    "Element",
    "EvalError",
    "EvalReport",
    "Expr",
    "Literal",
    "NameRef",
    "Neg",
    "ParseError",
    "Program",
    "SCALAR",
    "TypecheckError",
    "TypedProgram",
    "VECTOR",
    "VectorVar",
    "WHITELIST_FNS",
    "as_callable",
    "canonical_hash",
    "canonicalize",
    "evaluate",
    "evaluate_batch",
    "inline",
    "parse",
    "render",
    "typecheck",
]


def parse_typed(source_text: str) -> TypedProgram:
    """Parse and typecheck in one step."""
    return typecheck(parse(source_text))
