"""Uniform access to text and vision model backends."""

from .backends import MockBackend, OpenAIChatBackend, TransientBackendError, load_fixtures
from .client import GENERATE_ROLES, JUDGE_CRITERIA, ROLE_TAGS, Gateway
from .cost import compute_cost, export_ledger, usage_cost
from .jsonparse import extract_json, parse_json_object
from .types import (
    BackendDescriptor,
    ModelRequest,
    ModelResponse,
    TokenLedger,
    TokenUsage,
)

__all__ = [
    "BackendDescriptor",
    "GENERATE_ROLES",
    "Gateway",
    "JUDGE_CRITERIA",
    "MockBackend",
    "ModelRequest",
    "ModelResponse",
    "OpenAIChatBackend",
    "ROLE_TAGS",
    "TokenLedger",
    "TokenUsage",
    "TransientBackendError",
    "compute_cost",
    "export_ledger",
    "extract_json",
    "load_fixtures",
    "parse_json_object",
    "usage_cost",
]
