"""Pull one JSON object out of a model response and validate it."""

from __future__ import annotations

import json
import re
from typing import Any, Optional

from pydantic import BaseModel, ValidationError

from ..errors import JSONParseError, SchemaValidationError
from .schemas import SCHEMAS

_FENCE = re.compile(r"```(?:json|JSON)?\s*\n?(.*?)```", re.DOTALL)


def _loads_object(text: str) -> Optional[Any]:
    try:
        value = json.loads(text)
    except (json.JSONDecodeError, TypeError):
        return None
    return value if isinstance(value, dict) else None


def _first_balanced_object(text: str) -> Optional[dict]:
    decoder = json.JSONDecoder()
    for match in re.finditer(r"\{", text):
        try:
            value, _ = decoder.raw_decode(text, match.start())
        except json.JSONDecodeError:
            continue
        if isinstance(value, dict):
            return value
    return None


def parse_json_object(raw: str) -> dict:
    """Direct parse first, then fenced blocks, then the first balanced ``{...}``."""
    value = _loads_object(raw.strip())
    if value is not None:
        return value
    for block in _FENCE.findall(raw):
        value = _loads_object(block.strip()) or _first_balanced_object(block)
        if value is not None:
            return value
    value = _first_balanced_object(raw)
    if value is not None:
        return value
    raise JSONParseError("no parseable JSON object in model output", raw)


def _error_fields(exc: ValidationError) -> list[str]:
    fields = []
    for err in exc.errors():
        loc = ".".join(str(p) for p in err["loc"]) or "<root>"
        fields.append(f"{loc}: {err['msg']}")
    return fields


def validate(obj: dict, schema_id: str, raw: str = "") -> BaseModel:
    try:
        model = SCHEMAS[schema_id]
    except KeyError:
        raise KeyError(f"unknown schema id {schema_id!r}") from None
    try:
        return model.model_validate(obj)
    except ValidationError as exc:
        fields = _error_fields(exc)
        raise SchemaValidationError(
            f"output does not match schema '{schema_id}': " + "; ".join(fields), fields, raw
        ) from exc


def extract_json(raw: str, schema_id: Optional[str] = None) -> Any:
    """Parse ``raw`` and, when ``schema_id`` is given, return the validated model.

    Without a schema the bare dict is returned.
    """
    obj = parse_json_object(raw)
    if schema_id is None:
        return obj
    return validate(obj, schema_id, raw)
