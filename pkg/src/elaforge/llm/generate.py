"""Turning raw model responses into typed candidate programs.

``extract_program`` pulls the first fenced code block out of a response and
runs it through the parser and typechecker.  ``QuerySession`` wraps a
provider with global budget accounting and a bounded repair loop: a failed
extraction triggers a re-prompt that carries the error and the offending
block, and every attempt (including repairs and transport failures) costs
one unit of budget.
"""

from __future__ import annotations

import hashlib
import re

from dataclasses import dataclass, field

from .. import dsl
from ..ela import NormalizedVector
from .client import ProviderError
from .prompts import PromptKind, render_prompt

DEFAULT_REPAIR_RETRIES = 2

_FENCE_RE = re.compile(r"```(?:[A-Za-z0-9_+-]*)[ \t]*\r?\n(.*?)```", re.DOTALL)


class ExtractionError(Exception):
    def __init__(self, reason: str, block: str | None = None):
        self.reason = reason
        self.block = block
        super().__init__(reason)


def extract_block(response: str) -> str:
    """First fenced code block of a response; later blocks are ignored."""
    match = _FENCE_RE.search(response)
    if match is None:
        raise ExtractionError("no fenced code block in response")
    return match.group(1)


def extract_program(response: str) -> dsl.TypedProgram:
    """First fenced block, parsed and typechecked.

    Canonicalization runs here too, so pathological but parseable inputs
    (deep name chains) are rejected up front instead of blowing up later
    in deduplication.
    """
    block = extract_block(response)
    try:
        program = dsl.parse(block)
        typed = dsl.typecheck(program)
        dsl.canonicalize(program)
        return typed
    except dsl.DslError as exc:
        raise ExtractionError(str(exc), block=block) from exc
    except RecursionError:
        raise ExtractionError("expression nested too deeply", block=block) from None


def prompt_hash(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


@dataclass
class Attempt:
    """One provider round trip; log.jsonl gets one object per attempt."""

    query_index: int
    kind: PromptKind
    prompt: str
    response: str | None
    outcome: str  # ok | parse_error | no_block | transport_error
    error: str | None = None


@dataclass
class QueryOutcome:
    typed: dsl.TypedProgram | None
    attempts: list[Attempt] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.typed is not None


class BudgetExhausted(Exception):
    pass


class QuerySession:
    """Budget-accounted query issuer shared by the search loops."""

    def __init__(self, provider, budget: int, repair_retries: int = DEFAULT_REPAIR_RETRIES):
        if budget < 1:
            raise ValueError("budget must be at least 1")
        self.provider = provider
        self.budget = budget
        self.repair_retries = repair_retries
        self.spent = 0

    @property
    def remaining(self) -> int:
        return self.budget - self.spent

    def query(
        self,
        kind: PromptKind,
        target: NormalizedVector,
        context: list[dsl.Program],
    ) -> QueryOutcome:
        """Prompt, extract, and repair until success, retries, or budget end."""
        if self.remaining <= 0:
            raise BudgetExhausted(f"budget of {self.budget} queries is spent")

        base_prompt = render_prompt(kind, target, context)
        prompt = base_prompt
        attempts: list[Attempt] = []
        max_attempts = min(self.repair_retries + 1, self.remaining)

        for _ in range(max_attempts):
            index = self.spent
            self.spent += 1
            try:
                response = self.provider.complete(prompt)
            except ProviderError as exc:
                attempts.append(
                    Attempt(index, kind, prompt, None, "transport_error", str(exc))
                )
                return QueryOutcome(None, attempts)

            try:
                typed = extract_program(response)
            except ExtractionError as exc:
                outcome = "no_block" if exc.block is None else "parse_error"
                attempts.append(
                    Attempt(index, kind, prompt, response, outcome, exc.reason)
                )
                prompt = _repair_prompt(base_prompt, exc)
                continue

            attempts.append(Attempt(index, kind, prompt, response, "ok"))
            return QueryOutcome(typed, attempts)

        return QueryOutcome(None, attempts)


def query_candidate(
    provider,
    kind: PromptKind,
    target: NormalizedVector,
    context: list[dsl.Program],
    repair_retries: int = DEFAULT_REPAIR_RETRIES,
) -> QueryOutcome:
    """One-off query with its own repair budget; see QuerySession for runs."""
    session = QuerySession(provider, budget=repair_retries + 1, repair_retries=repair_retries)
    return session.query(kind, target, context)


def _repair_prompt(base_prompt: str, error: ExtractionError) -> str:
    parts = [
        base_prompt,
        "",
        "Your previous response could not be used.",
        f"Problem: {error.reason}",
    ]
    if error.block is not None:
        parts += ["Previous code block:", "```python", error.block.rstrip(), "```"]
    parts.append(
        "Please answer again with one markdown code block that satisfies every "
        "implementation requirement, including requirement 8."
    )
    return "\n".join(parts)
