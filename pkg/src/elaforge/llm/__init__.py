"""Prompt rendering, chat providers, and response-to-program extraction."""

from .client import HttpProvider, MockProvider, ProviderConfig, ProviderError
from .generate import (
    Attempt,
    BudgetExhausted,
    DEFAULT_REPAIR_RETRIES,
    ExtractionError,
    QueryOutcome,
    QuerySession,
    extract_block,
    extract_program,
    prompt_hash,
    query_candidate,
)
from .prompts import ArityError, PromptKind, format_features, render_prompt

__all__ = [
    "ArityError",
    "Attempt",
    "BudgetExhausted",
    "DEFAULT_REPAIR_RETRIES",
    "ExtractionError",
    "HttpProvider",
    "MockProvider",
    "PromptKind",
    "ProviderConfig",
    "ProviderError",
    "QueryOutcome",
    "QuerySession",
    "extract_block",
    "extract_program",
    "format_features",
    "prompt_hash",
    "query_candidate",
    "render_prompt",
]
