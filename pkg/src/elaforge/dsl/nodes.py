"""Expression tree for the candidate-function language.

Candidates are straight-line functions: a sequence of single-assignment
bindings followed by one return expression.  Every node is immutable, so
typed programs can be evaluated concurrently without locking.
"""

from __future__ import annotations

from dataclasses import dataclass, field

# Functions callable inside candidate expressions.  Elementwise functions
# preserve scalar/vector shape; reductions take a vector and yield a scalar;
# min/max are either a two-argument scalar form or a one-argument reduction.
ELEMENTWISE_FNS = frozenset(
    {"sin", "cos", "tan", "tanh", "exp", "log", "sqrt", "abs", "floor"}
)
REDUCTION_FNS = frozenset({"sum", "prod", "mean", "norm2"})
MINMAX_FNS = frozenset({"min", "max"})
WHITELIST_FNS = ELEMENTWISE_FNS | REDUCTION_FNS | MINMAX_FNS

BINARY_OPS = ("+", "-", "*", "/", "**")


class DslError(Exception):
    """Base class for all candidate-language errors."""


class ParseError(DslError):
    def __init__(self, reason: str, line: int | None = None, col: int | None = None):
        self.reason = reason
        self.line = line
        self.col = col
        loc = f" (line {line}, col {col})" if line is not None else ""
        super().__init__(f"{reason}{loc}")


class TypecheckError(DslError):
    pass


class EvalError(DslError):
    pass


@dataclass(frozen=True)
class Expr:
    pass


@dataclass(frozen=True)
class Literal(Expr):
    value: float


@dataclass(frozen=True)
class VectorVar(Expr):
    """The whole input vector (the function's single parameter)."""


@dataclass(frozen=True)
class Element(Expr):
    """Indexing a vector-valued expression with a fixed coordinate."""

    base: Expr
    index: int


@dataclass(frozen=True)
class NameRef(Expr):
    name: str


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr


@dataclass(frozen=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Call(Expr):
    fn: str
    args: tuple[Expr, ...]


@dataclass(frozen=True)
class Program:
    """A parsed candidate: named assignments plus a result expression."""

    name: str
    body: tuple[tuple[str, Expr], ...]
    result: Expr
    source_text: str = field(compare=False, default="")

    def assignments(self) -> dict[str, Expr]:
        return dict(self.body)


@dataclass(frozen=True)
class TypedProgram:
    """A program that passed static checks; safe to evaluate.

    ``dim_hint`` is the smallest input length the program can accept
    (highest coordinate index used + 1), or None when only whole-vector
    operations appear.
    """

    program: Program
    dim_hint: int | None

    @property
    def name(self) -> str:
        return self.program.name
