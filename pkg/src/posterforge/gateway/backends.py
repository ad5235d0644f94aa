"""Backend implementations: scripted mock and OpenAI-compatible chat endpoints."""

from __future__ import annotations

import base64
import json
import os
import threading
from collections import defaultdict
from pathlib import Path
from typing import Any, Callable, Optional, Protocol, Union

import httpx
import yaml

from ..errors import BackendUnavailableError, ConfigurationError
from .types import BackendDescriptor, ModelRequest, ModelResponse, TokenUsage

Responder = Callable[[ModelRequest], Union[str, ModelResponse]]


class TransientBackendError(Exception):
    """Raised by a backend for failures worth retrying."""


class Backend(Protocol):
    def send(self, request: ModelRequest) -> ModelResponse: ...


def load_fixtures(path: Union[str, Path]) -> dict[str, Any]:
    text = Path(path).read_text()
    data = yaml.safe_load(text) if str(path).endswith((".yaml", ".yml")) else json.loads(text)
    if not isinstance(data, dict):
        raise ConfigurationError(f"mock fixture file {path} must map role tags to responses")
    return data


class MockBackend:
    """Returns canned responses keyed by role tag.

    A fixture entry is one of:

    * a string, returned for every call;
    * a list of strings, returned in call order per role tag (the last one repeats);
    * a mapping with ``by_hash`` (prompt hash -> response) and an optional ``default``
      that is itself a string or list.

    A ``responder`` callable takes precedence over fixtures when given. Usage is
    zero unless ``count_tokens`` is set, in which case whitespace words stand in for
    text tokens and each image costs the descriptor's ``image_token_cost``.
    """

    def __init__(
        self,
        descriptor: BackendDescriptor,
        fixtures: Optional[dict[str, Any]] = None,
        responder: Optional[Responder] = None,
        count_tokens: bool = False,
    ) -> None:
        self.descriptor = descriptor
        self.fixtures = fixtures or {}
        self.responder = responder
        self.count_tokens = count_tokens
        self._counters: dict[str, int] = defaultdict(int)
        self._lock = threading.Lock()

    def _next(self, role: str, entries: list) -> str:
        with self._lock:
            i = self._counters[role]
            self._counters[role] += 1
        return str(entries[min(i, len(entries) - 1)])

    def _lookup(self, request: ModelRequest) -> str:
        entry = self.fixtures.get(request.role_tag)
        if entry is None:
            entry = self.fixtures.get("*")
        if entry is None:
            raise BackendUnavailableError(
                f"mock backend '{self.descriptor.id}' has no fixture for role '{request.role_tag}'"
            )
        if isinstance(entry, dict):
            by_hash = entry.get("by_hash", {})
            digest = request.prompt_hash()
            if digest in by_hash:
                return str(by_hash[digest])
            if "default" not in entry:
                raise BackendUnavailableError(
                    f"mock fixture for '{request.role_tag}' has no entry for hash {digest}"
                )
            entry = entry["default"]
        if isinstance(entry, list):
            return self._next(request.role_tag, entry)
        return str(entry)

    def _usage(self, request: ModelRequest, text: str) -> TokenUsage:
        if not self.count_tokens:
            return TokenUsage()
        n_in = len((request.system_prompt + " " + request.user_prompt).split())
        n_out = len(text.split())
        if self.descriptor.modality == "vision":
            n_in += len(request.images) * self.descriptor.image_token_cost
            return TokenUsage(in_v=n_in, out_v=n_out)
        return TokenUsage(in_t=n_in, out_t=n_out)

    def send(self, request: ModelRequest) -> ModelResponse:
        if self.responder is not None:
            out = self.responder(request)
            if isinstance(out, ModelResponse):
                return out
            return ModelResponse(out, self._usage(request, out))
        text = self._lookup(request)
        return ModelResponse(text, self._usage(request, text))


def _image_url(blob: bytes) -> str:
    mime = "image/png"
    if blob[:3] == b"\xff\xd8\xff":
        mime = "image/jpeg"
    return f"data:{mime};base64,{base64.b64encode(blob).decode()}"


class OpenAIChatBackend:
    """Chat-completions client for any OpenAI-compatible server.

    Endpoint keys: ``base_url``, ``model``, optional ``api_key_env`` (name of the
    environment variable holding the key), ``timeout`` and ``temperature``.
    """

    def __init__(self, descriptor: BackendDescriptor, client: Optional[httpx.Client] = None) -> None:
        ep = descriptor.endpoint
        if "base_url" not in ep or "model" not in ep:
            raise ConfigurationError(f"backend {descriptor.id}: endpoint needs base_url and model")
        self.descriptor = descriptor
        self.model = ep["model"]
        headers = {}
        key_env = ep.get("api_key_env")
        if key_env:
            key = os.environ.get(key_env)
            if key:
                headers["Authorization"] = f"Bearer {key}"
        self.client = client or httpx.Client(
            base_url=ep["base_url"], headers=headers, timeout=float(ep.get("timeout", 120))
        )
        self.temperature = ep.get("temperature", 0.0)

    def _messages(self, request: ModelRequest) -> list[dict]:
        messages = []
        if request.system_prompt:
            messages.append({"role": "system", "content": request.system_prompt})
        if request.images:
            content: list[dict] = [{"type": "text", "text": request.user_prompt}]
            for blob in request.image_bytes():
                content.append({"type": "image_url", "image_url": {"url": _image_url(blob)}})
            messages.append({"role": "user", "content": content})
        else:
            messages.append({"role": "user", "content": request.user_prompt})
        return messages

    def send(self, request: ModelRequest) -> ModelResponse:
        body = {"model": self.model, "messages": self._messages(request), "temperature": self.temperature}
        try:
            resp = self.client.post("/chat/completions", json=body)
        except httpx.TransportError as exc:
            raise TransientBackendError(str(exc)) from exc
        if resp.status_code == 429 or resp.status_code >= 500:
            raise TransientBackendError(f"HTTP {resp.status_code}: {resp.text[:200]}")
        if resp.status_code >= 400:
            raise BackendUnavailableError(
                f"backend {self.descriptor.id} rejected request: HTTP {resp.status_code} {resp.text[:200]}"
            )
        data = resp.json()
        text = data["choices"][0]["message"].get("content") or ""
        usage = data.get("usage") or {}
        n_in = int(usage.get("prompt_tokens", 0))
        n_out = int(usage.get("completion_tokens", 0))
        if self.descriptor.modality == "vision":
            return ModelResponse(text, TokenUsage(in_v=n_in, out_v=n_out))
        return ModelResponse(text, TokenUsage(in_t=n_in, out_t=n_out))


def make_backend(
    descriptor: BackendDescriptor,
    base_dir: Optional[Path] = None,
    responder: Optional[Responder] = None,
) -> Backend:
    kind = descriptor.endpoint.get("kind", "mock")
    if kind == "mock":
        fixtures = descriptor.endpoint.get("fixtures", {})
        if isinstance(fixtures, (str, Path)):
            path = Path(fixtures)
            if base_dir is not None and not path.is_absolute():
                path = base_dir / path
            fixtures = load_fixtures(path)
        return MockBackend(
            descriptor,
            fixtures=fixtures,
            responder=responder,
            count_tokens=bool(descriptor.endpoint.get("count_tokens", False)),
        )
    if kind == "openai":
        return OpenAIChatBackend(descriptor)
    raise ConfigurationError(f"backend {descriptor.id}: unknown endpoint kind {kind!r}")
