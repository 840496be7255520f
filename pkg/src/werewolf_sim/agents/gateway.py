"""Chat-completion style HTTP client for full-model runs.

Request body::

    {"model": <optional>, "messages": [{"role": "system", ...}, {"role": "user", ...}],
     "temperature": float, "max_tokens": int}

The reply may be OpenAI-shaped (``choices[0].message.content``) or a bare
``{"content": ...}`` / ``{"text": ...}`` object. Anything else is returned as
the raw body so the repair step can deal with it.
"""

from __future__ import annotations

import logging
import os
import time
from dataclasses import dataclass
from typing import Any, Callable

import httpx

from werewolf_sim.agents.context import AgentContext, Request
from werewolf_sim.agents.prompts import build_prompt
from werewolf_sim.errors import BackendError, ConfigError

log = logging.getLogger(__name__)

ENDPOINT_ENV = "WEREWOLF_SIM_ENDPOINT"
DEFAULT_KEY_ENV = "WEREWOLF_SIM_API_KEY"
SYSTEM_PROMPT = "You are a player in a game of Werewolf. Answer with a single JSON object."


@dataclass(frozen=True)
class GatewayConfig:
    endpoint: str
    api_key_env: str = DEFAULT_KEY_ENV
    model: str | None = None
    timeout: float = 60.0
    max_retries: int = 3
    backoff: float = 0.5
    temperature: float = 0.7
    max_tokens: int = 512

    @classmethod
    def resolve(cls, settings: dict[str, Any] | None = None) -> GatewayConfig:
        """Build from config-file settings, falling back to the environment for the endpoint."""
        settings = dict(settings or {})
        endpoint = settings.pop("endpoint", None) or os.environ.get(ENDPOINT_ENV)
        if not endpoint:
            raise ConfigError(f"llm mode needs an endpoint: set backend.endpoint or ${ENDPOINT_ENV}")
        known = {k: v for k, v in settings.items() if k in cls.__dataclass_fields__}
        cfg = cls(endpoint=endpoint, **known)
        if cfg.max_retries < 0 or cfg.timeout <= 0:
            raise ConfigError("max_retries must be >= 0 and timeout > 0")
        return cfg


@dataclass(frozen=True)
class RawModelOutput:
    prompt: str
    text: str
    attempts: int = 1


def _extract_text(body: Any, fallback: str) -> str:
    if isinstance(body, dict):
        choices = body.get("choices")
        if isinstance(choices, list) and choices:
            first = choices[0]
            if isinstance(first, dict):
                msg = first.get("message")
                if isinstance(msg, dict) and isinstance(msg.get("content"), str):
                    return msg["content"]
                if isinstance(first.get("text"), str):
                    return first["text"]
        for key in ("content", "text", "completion"):
            if isinstance(body.get(key), str):
                return body[key]
    return fallback


class GatewayClient:
    """Thread-safe; one instance may serve many concurrent games."""

    def __init__(
        self,
        config: GatewayConfig,
        *,
        transport: httpx.BaseTransport | None = None,
        sleep: Callable[[float], None] = time.sleep,
    ) -> None:
        self.config = config
        self._sleep = sleep
        headers = {"Content-Type": "application/json"}
        key = os.environ.get(config.api_key_env)
        if key:
            headers["Authorization"] = f"Bearer {key}"
        self._http = httpx.Client(timeout=config.timeout, headers=headers, transport=transport)

    def close(self) -> None:
        self._http.close()

    def complete(self, prompt: str, *, tag: str = "") -> tuple[str, int]:
        """Return (completion text, attempts used). Retries transport failures with backoff."""
        body: dict[str, Any] = {
            "messages": [
                {"role": "system", "content": SYSTEM_PROMPT},
                {"role": "user", "content": prompt},
            ],
            "temperature": self.config.temperature,
            "max_tokens": self.config.max_tokens,
        }
        if self.config.model:
            body["model"] = self.config.model
        attempts = self.config.max_retries + 1
        last: Exception | None = None
        for attempt in range(1, attempts + 1):
            try:
                resp = self._http.post(self.config.endpoint, json=body, headers={"X-Request-Tag": tag})
                if resp.status_code == 429 or resp.status_code >= 500:
                    raise httpx.HTTPStatusError(f"status {resp.status_code}", request=resp.request, response=resp)
                if resp.status_code >= 400:
                    raise BackendError(f"endpoint rejected request with status {resp.status_code}")
                try:
                    parsed = resp.json()
                except ValueError:
                    parsed = None
                return _extract_text(parsed, resp.text), attempt
            except (httpx.TransportError, httpx.HTTPStatusError) as exc:
                last = exc
                log.warning("gateway attempt %d/%d failed (%s): %s", attempt, attempts, tag, exc)
                if attempt < attempts:
                    self._sleep(self.config.backoff * 2 ** (attempt - 1))
        raise BackendError(f"gateway failed after {attempts} attempts: {last}")


def gateway_decide(ctx: AgentContext, request: Request, client: GatewayClient, *, tag: str = "") -> RawModelOutput:
    prompt = build_prompt(ctx, request)
    text, attempts = client.complete(prompt, tag=tag)
    return RawModelOutput(prompt, text, attempts)
