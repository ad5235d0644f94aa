from __future__ import annotations

import logging
import threading
from dataclasses import replace
from pathlib import Path
from typing import Any, Callable, Iterable, Optional, Union

from tenacity import RetryError, Retrying, retry_if_exception_type, stop_after_attempt, wait_exponential

from ..errors import (
    BackendUnavailableError,
    ConfigurationError,
    ContractError,
    JSONParseError,
    SchemaValidationError,
)
from .backends import Backend, Responder, TransientBackendError, make_backend
from .jsonparse import extract_json
from .types import BackendDescriptor, ModelRequest, ModelResponse, TokenLedger

log = logging.getLogger(__name__)

JUDGE_CRITERIA = (
    "element_quality",
    "layout_balance",
    "engagement",
    "clarity",
    "content_completeness",
    "logical_flow",
)

# Fixed so mock fixtures and ledgers stay stable across refactors.
ROLE_TAGS: tuple[str, ...] = (
    "parser.summarize",
    "parser.filter",
    "planner.match",
    "painter.compose",
    "commenter.critique",
    *(f"judge.{c}" for c in JUDGE_CRITERIA),
    "quiz.generate.verbatim",
    "quiz.generate.interpretive",
    "quiz.answer",
)

GENERATE_ROLES = ("parser.summarize", "parser.filter", "planner.match", "painter.compose", "commenter.critique")

# Extra business-rule check run after schema validation; returns a list of problems.
Check = Callable[[Any], list[str]]


class Gateway:
    """Routes requests to backends, retries transport failures, and records usage."""

    def __init__(
        self,
        backends: Iterable[BackendDescriptor],
        routing: Optional[dict[str, str]] = None,
        ledger: Optional[TokenLedger] = None,
        base_dir: Optional[Path] = None,
        responders: Optional[dict[str, Responder]] = None,
        retry_wait: float = 0.5,
    ) -> None:
        self.descriptors: dict[str, BackendDescriptor] = {}
        self._backends: dict[str, Backend] = {}
        self._slots: dict[str, threading.BoundedSemaphore] = {}
        responders = responders or {}
        for d in backends:
            if d.id in self.descriptors:
                raise ConfigurationError(f"duplicate backend id '{d.id}'")
            self.descriptors[d.id] = d
            self._backends[d.id] = make_backend(d, base_dir=base_dir, responder=responders.get(d.id))
            self._slots[d.id] = threading.BoundedSemaphore(d.max_in_flight)
        self.routing = dict(routing or {})
        for role, backend_id in self.routing.items():
            if backend_id not in self.descriptors:
                raise ConfigurationError(f"role '{role}' routed to undefined backend '{backend_id}'")
        self.ledger = ledger or TokenLedger()
        self.retry_wait = retry_wait

    def require_roles(self, roles: Iterable[str]) -> None:
        for role in roles:
            if role not in self.routing:
                raise ConfigurationError(f"missing backend for role '{role}'")

    def resolve(self, role_tag: str, backend: Union[BackendDescriptor, str, None] = None) -> BackendDescriptor:
        if isinstance(backend, BackendDescriptor):
            if backend.id not in self.descriptors:
                raise ConfigurationError(f"backend '{backend.id}' is not registered with this gateway")
            return backend
        backend_id = backend or self.routing.get(role_tag)
        if backend_id is None:
            raise ConfigurationError(f"missing backend for role '{role_tag}'")
        if backend_id not in self.descriptors:
            raise ConfigurationError(f"unknown backend '{backend_id}'")
        return self.descriptors[backend_id]

    def complete(
        self, request: ModelRequest, backend: Union[BackendDescriptor, str, None] = None
    ) -> ModelResponse:
        desc = self.resolve(request.role_tag, backend)
        if request.images and desc.modality != "vision":
            raise ContractError(
                f"request '{request.role_tag}' carries images but backend '{desc.id}' is text-only"
            )
        impl = self._backends[desc.id]
        retrying = Retrying(
            stop=stop_after_attempt(desc.max_retries + 1),
            wait=wait_exponential(multiplier=self.retry_wait, max=30),
            retry=retry_if_exception_type(TransientBackendError),
            reraise=False,
        )
        try:
            with self._slots[desc.id]:
                for attempt in retrying:
                    with attempt:
                        response = impl.send(request)
        except RetryError as exc:
            cause = exc.last_attempt.exception()
            raise BackendUnavailableError(
                f"backend '{desc.id}' unavailable after {desc.max_retries + 1} attempts: {cause}"
            ) from cause
        self.ledger.record(desc.id, request.role_tag, response.usage)
        return response

    def complete_json(
        self,
        request: ModelRequest,
        schema_id: str,
        backend: Union[BackendDescriptor, str, None] = None,
        check: Optional[Check] = None,
    ) -> Any:
        """Complete and parse, reprompting once with the error when the output is invalid.

        Parse and schema failures from the second attempt propagate; so does a
        failing ``check``, as a :class:`SchemaValidationError`.
        """
        attempt_request = request
        for attempt in range(2):
            response = self.complete(attempt_request, backend)
            try:
                value = extract_json(response.text, schema_id)
                problems = check(value) if check else []
                if problems:
                    raise SchemaValidationError(
                        f"output violates rules for '{schema_id}': " + "; ".join(problems),
                        problems,
                        response.text,
                    )
                return value
            except (JSONParseError, SchemaValidationError) as exc:
                if attempt == 1:
                    raise
                log.warning("role %s: invalid JSON output, reprompting (%s)", request.role_tag, exc)
                attempt_request = replace(
                    request,
                    user_prompt=(
                        request.user_prompt
                        + "\n\nYour previous answer was rejected: "
                        + str(exc).splitlines()[0]
                        + "\nReturn only a corrected JSON object."
                    ),
                )
        raise AssertionError("unreachable")
