"""Request/response records and the token ledger."""

from __future__ import annotations

import hashlib
import threading
from collections import defaultdict
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Literal, Union

from ..errors import ConfigurationError

Modality = Literal["text", "vision"]
ImagePayload = Union[bytes, str, Path]

DEFAULT_IMAGE_TOKEN_COST = 765


@dataclass(frozen=True)
class TokenUsage:
    in_t: int = 0
    out_t: int = 0
    in_v: int = 0
    out_v: int = 0

    def __post_init__(self) -> None:
        for name in ("in_t", "out_t", "in_v", "out_v"):
            if getattr(self, name) < 0:
                raise ValueError(f"token count {name} must be >= 0")

    def __add__(self, other: TokenUsage) -> TokenUsage:
        return TokenUsage(
            self.in_t + other.in_t,
            self.out_t + other.out_t,
            self.in_v + other.in_v,
            self.out_v + other.out_v,
        )

    @property
    def input_tokens(self) -> int:
        return self.in_t + self.in_v

    @property
    def output_tokens(self) -> int:
        return self.out_t + self.out_v

    @property
    def total(self) -> int:
        return self.input_tokens + self.output_tokens

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.in_t, self.out_t, self.in_v, self.out_v)


@dataclass(frozen=True)
class BackendDescriptor:
    """A model backend plus its pricing (USD per 1M tokens) and retry budget.

    ``endpoint`` is opaque to the gateway; the backend factory reads its
    ``kind`` key ("mock" or "openai") and whatever else that kind needs.
    """

    id: str
    modality: Modality
    endpoint: dict[str, Any] = field(default_factory=dict)
    price_in: float = 0.0
    price_out: float = 0.0
    max_retries: int = 2
    max_in_flight: int = 4
    image_token_cost: int = DEFAULT_IMAGE_TOKEN_COST

    def __post_init__(self) -> None:
        if not self.id:
            raise ConfigurationError("backend id must be non-empty")
        if self.modality not in ("text", "vision"):
            raise ConfigurationError(f"backend {self.id}: unknown modality {self.modality!r}")
        if self.price_in < 0 or self.price_out < 0:
            raise ConfigurationError(f"backend {self.id}: prices must be >= 0")
        if self.max_retries < 0:
            raise ConfigurationError(f"backend {self.id}: max_retries must be >= 0")
        if self.max_in_flight < 1:
            raise ConfigurationError(f"backend {self.id}: max_in_flight must be >= 1")

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> BackendDescriptor:
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ConfigurationError(f"backend {data.get('id')}: unknown keys {sorted(unknown)}")
        return cls(**data)


@dataclass(frozen=True)
class ModelRequest:
    role_tag: str
    system_prompt: str
    user_prompt: str
    images: tuple[ImagePayload, ...] = ()
    expect_json: bool = False

    def __post_init__(self) -> None:
        if not self.role_tag:
            raise ValueError("role_tag must be non-empty")
        object.__setattr__(self, "images", tuple(self.images))

    def image_bytes(self) -> list[bytes]:
        out = []
        for img in self.images:
            if isinstance(img, bytes):
                out.append(img)
            else:
                out.append(Path(img).read_bytes())
        return out

    def prompt_hash(self) -> str:
        h = hashlib.sha256()
        h.update(self.role_tag.encode())
        h.update(b"\0")
        h.update(self.system_prompt.encode())
        h.update(b"\0")
        h.update(self.user_prompt.encode())
        for blob in self.image_bytes():
            h.update(b"\0")
            h.update(hashlib.sha256(blob).digest())
        return h.hexdigest()[:16]


@dataclass(frozen=True)
class ModelResponse:
    text: str
    usage: TokenUsage = TokenUsage()


class TokenLedger:
    """Thread-safe accumulator of usage per backend id and per role tag."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._by_backend: dict[str, TokenUsage] = defaultdict(TokenUsage)
        self._by_role: dict[str, TokenUsage] = defaultdict(TokenUsage)
        self._calls = 0

    def record(self, backend_id: str, role_tag: str, usage: TokenUsage) -> None:
        with self._lock:
            self._by_backend[backend_id] = self._by_backend[backend_id] + usage
            self._by_role[role_tag] = self._by_role[role_tag] + usage
            self._calls += 1

    @property
    def calls(self) -> int:
        return self._calls

    def by_backend(self) -> dict[str, TokenUsage]:
        with self._lock:
            return dict(self._by_backend)

    def by_role(self) -> dict[str, TokenUsage]:
        with self._lock:
            return dict(self._by_role)

    def total(self) -> TokenUsage:
        out = TokenUsage()
        for usage in self.by_backend().values():
            out = out + usage
        return out

    def merge(self, other: TokenLedger) -> TokenLedger:
        merged = TokenLedger()
        for src in (self, other):
            with src._lock:
                for k, v in src._by_backend.items():
                    merged._by_backend[k] = merged._by_backend[k] + v
                for k, v in src._by_role.items():
                    merged._by_role[k] = merged._by_role[k] + v
                merged._calls += src._calls
        return merged

    def to_dict(self) -> dict[str, Any]:
        return {
            "calls": self.calls,
            "by_backend": {k: asdict(v) for k, v in sorted(self.by_backend().items())},
            "by_role": {k: asdict(v) for k, v in sorted(self.by_role().items())},
            "total": asdict(self.total()),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> TokenLedger:
        ledger = cls()
        for k, v in data.get("by_backend", {}).items():
            ledger._by_backend[k] = TokenUsage(**v)
        for k, v in data.get("by_role", {}).items():
            ledger._by_role[k] = TokenUsage(**v)
        ledger._calls = int(data.get("calls", 0))
        return ledger
