from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable

from ..errors import ConfigurationError
from .types import BackendDescriptor, TokenLedger, TokenUsage

PER_MILLION = 1_000_000


def usage_cost(usage: TokenUsage, backend: BackendDescriptor) -> float:
    return (
        usage.input_tokens / PER_MILLION * backend.price_in
        + usage.output_tokens / PER_MILLION * backend.price_out
    )


def compute_cost(ledger: TokenLedger, backends: Iterable[BackendDescriptor]) -> float:
    """Total USD cost of a ledger under the given backend prices.

    Text and vision tokens are both billed at the backend's input/output
    rate; a backend id with no descriptor is a configuration error.
    """
    table = {b.id: b for b in backends}
    total = 0.0
    for backend_id, usage in ledger.by_backend().items():
        if backend_id not in table:
            raise ConfigurationError(f"no pricing descriptor for backend '{backend_id}'")
        total += usage_cost(usage, table[backend_id])
    return total


def export_ledger(ledger: TokenLedger, backends: Iterable[BackendDescriptor], path: Path) -> dict:
    backends = list(backends)
    payload = ledger.to_dict()
    payload["cost_usd"] = compute_cost(ledger, backends)
    table = {b.id: b for b in backends}
    payload["cost_by_backend"] = {
        k: usage_cost(v, table[k]) for k, v in sorted(ledger.by_backend().items())
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2))
    return payload
