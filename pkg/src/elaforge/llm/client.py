"""Chat-completion providers.

``HttpProvider`` speaks the OpenAI-compatible /chat/completions JSON
protocol against any base URL, with transport-level retries.
``MockProvider`` replays a scripted transcript (a JSON array of response
strings) for offline, fully deterministic runs.  Anything with a
``complete(prompt) -> str`` method can serve as a provider.
"""

from __future__ import annotations

import json
import os
import time

from dataclasses import dataclass
from pathlib import Path

import requests


class ProviderError(Exception):
    """Transport failure, bad payload, or transcript exhaustion."""


@dataclass(frozen=True)
class ProviderConfig:
    base_url: str = "https://api.openai.com/v1"
    model: str = "gpt-4o-mini"
    temperature: float = 1.0
    max_tokens: int = 2048
    timeout: float = 120.0
    retries: int = 2
    api_key_env: str = "ELAFORGE_API_KEY"

    def __post_init__(self):
        if self.retries < 0:
            raise ValueError("retries must be >= 0")
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")


class HttpProvider:
    """OpenAI-compatible chat endpoint; single-turn user messages."""

    def __init__(self, config: ProviderConfig, session: requests.Session | None = None):
        self.config = config
        self._session = session or requests.Session()

    @property
    def description(self) -> str:
        return f"http:{self.config.base_url}:{self.config.model}"

    def complete(self, prompt: str) -> str:
        cfg = self.config
        url = cfg.base_url.rstrip("/") + "/chat/completions"
        headers = {"Content-Type": "application/json"}
        api_key = os.environ.get(cfg.api_key_env, "")
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        payload = {
            "model": cfg.model,
            "temperature": cfg.temperature,
            "max_tokens": cfg.max_tokens,
            "messages": [{"role": "user", "content": prompt}],
        }

        last_error: Exception | None = None
        for attempt in range(cfg.retries + 1):
            try:
                response = self._session.post(
                    url, headers=headers, json=payload, timeout=cfg.timeout
                )
                response.raise_for_status()
                body = response.json()
                return body["choices"][0]["message"]["content"]
            except (requests.RequestException, KeyError, IndexError, ValueError) as exc:
                last_error = exc
                if attempt < cfg.retries:
                    time.sleep(min(2.0**attempt, 30.0))
        raise ProviderError(
            f"request failed after {cfg.retries + 1} attempts: {last_error}"
        ) from last_error


class MockProvider:
    """Strictly sequential replay of scripted responses."""

    def __init__(self, responses: list[str]):
        self._responses = list(responses)
        self.cursor = 0

    @property
    def description(self) -> str:
        return f"mock:{len(self._responses)}"

    @classmethod
    def from_file(cls, path: str | Path) -> "MockProvider":
        payload = json.loads(Path(path).read_text())
        if not isinstance(payload, list) or not all(isinstance(r, str) for r in payload):
            raise ProviderError(f"{path}: transcript must be a JSON array of strings")
        return cls(payload)

    def complete(self, prompt: str) -> str:
        del prompt  # replay ignores the prompt text
        if self.cursor >= len(self._responses):
            raise ProviderError(
                f"transcript exhausted after {len(self._responses)} responses"
            )
        response = self._responses[self.cursor]
        self.cursor += 1
        return response
