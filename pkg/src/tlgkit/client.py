"""HTTP client for chat-completions and completions style backends.

The wire shapes are the widely deployed JSON ones: a completion request
posts {model, prompt, temperature, max_tokens} to ``/completions`` and
reads ``choices[0].text``; a chat request posts {model, messages, ...} to
``/chat/completions`` and reads ``choices[0].message.content``. Forced
prefixes ride as a trailing assistant message on chat backends that
declare prefill support, and as part of the raw prompt on completion
backends.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass
from pathlib import Path

import requests

from .errors import BackendConfigError

__all__ = ["BackendConfig", "GenerationClient", "RequestFailed"]

API_STYLES = ("chat", "completion")


class RequestFailed(Exception):
    """A single request failed after exhausting its retry budget."""


@dataclass(frozen=True)
class BackendConfig:
    endpoint_url: str
    api_style: str = "completion"
    model_name: str = "default"
    temperature: float = 0.0
    max_new_tokens: int = 2048
    auth_token: str | None = None
    max_parallel: int = 4
    retry_limit: int = 3
    retry_backoff: float = 0.5
    timeout: float = 60.0
    supports_prefill: bool = False

    def __post_init__(self) -> None:
        if not self.endpoint_url.startswith(("http://", "https://")):
            raise BackendConfigError(f"endpoint must be an http(s) URL: {self.endpoint_url!r}")
        if self.api_style not in API_STYLES:
            raise BackendConfigError(f"api_style must be one of {API_STYLES}")
        if self.temperature < 0:
            raise BackendConfigError("temperature must be >= 0")
        if self.max_new_tokens <= 0:
            raise BackendConfigError("max_new_tokens must be > 0")
        if self.max_parallel < 1:
            raise BackendConfigError("max_parallel must be >= 1")
        if self.retry_limit < 1:
            raise BackendConfigError("retry_limit must be >= 1")

    @classmethod
    def from_file(cls, path: str | Path) -> "BackendConfig":
        """Load a config file. The bearer token is never stored in the
        file; an ``auth_env`` key names the environment variable to read."""
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise BackendConfigError(f"{path}: expected a JSON object")
        data.pop("_comment", None)
        auth_env = data.pop("auth_env", None)
        token = os.environ.get(auth_env) if auth_env else None
        known = {k: v for k, v in data.items() if k in cls.__dataclass_fields__}
        unknown = set(data) - set(known)
        if unknown:
            raise BackendConfigError(f"{path}: unknown keys {sorted(unknown)}")
        return cls(auth_token=token, **known)


class GenerationClient:
    """Thin synchronous client; concurrency is the orchestrator's job."""

    def __init__(self, config: BackendConfig):
        self.config = config
        base = config.endpoint_url.rstrip("/")
        self._url = base + ("/chat/completions" if config.api_style == "chat" else "/completions")

    def _payload(self, user_content: str, assistant_prefix: str | None) -> dict:
        cfg = self.config
        common = {
            "model": cfg.model_name,
            "temperature": cfg.temperature,
            "max_tokens": cfg.max_new_tokens,
        }
        if cfg.api_style == "completion":
            return {**common, "prompt": user_content}
        messages = [{"role": "user", "content": user_content}]
        if assistant_prefix:
            messages.append({"role": "assistant", "content": assistant_prefix})
        return {**common, "messages": messages}

    def _headers(self) -> dict:
        headers = {"Content-Type": "application/json"}
        if self.config.auth_token:
            headers["Authorization"] = f"Bearer {self.config.auth_token}"
        return headers

    def _extract_text(self, body: dict) -> str:
        choice = body["choices"][0]
        if self.config.api_style == "chat":
            return choice["message"]["content"]
        return choice["text"]

    def generate(self, user_content: str, assistant_prefix: str | None = None) -> str:
        """Run one request with retries and exponential backoff.

        Raises RequestFailed once retry_limit attempts are exhausted; the
        caller decides whether that aborts the run.
        """
        cfg = self.config
        payload = self._payload(user_content, assistant_prefix)
        last_error: Exception | None = None
        for attempt in range(cfg.retry_limit):
            if attempt:
                time.sleep(cfg.retry_backoff * (2 ** (attempt - 1)))
            try:
                resp = requests.post(
                    self._url, json=payload, headers=self._headers(), timeout=cfg.timeout
                )
                resp.raise_for_status()
                return self._extract_text(resp.json())
            except (requests.RequestException, ValueError, KeyError, IndexError) as exc:
                last_error = exc
        raise RequestFailed(
            f"request failed after {cfg.retry_limit} attempts: {last_error}"
        ) from last_error
