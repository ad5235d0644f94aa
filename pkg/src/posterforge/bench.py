"""Batch generation and evaluation over a directory of paper/poster pairs.

Expected layout::

    <root>/<id>/paper.pdf   (or paper.md)
    <root>/<id>/poster.png  reference poster, optional

Every pair runs in its own working directory ``<out>/<id>``; a failing pair
is recorded with its error and the batch carries on.
"""

from __future__ import annotations

import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

from .config import RunConfig
from .errors import ContractError
from .evaluate import cmd_evaluate
from .gateway import Gateway, compute_cost
from .metrics import METRIC_COLUMNS, mean_row, write_csv
from .pipeline import cmd_generate
from .quizrun import cmd_quiz_gen, cmd_quiz_run, cmd_quiz_score

log = logging.getLogger(__name__)

PAPER_NAMES = ("paper.pdf", "paper.md")
REFERENCE_NAME = "poster.png"
COST_COLUMNS = ["Input Tokens", "Output Tokens", "Cost (USD)", "Time (s)"]

GatewayFactory = Callable[[str], Gateway]


@dataclass(frozen=True)
class BenchPair:
    pair_id: str
    paper: Path
    reference: Optional[Path]


def discover_pairs(root: Path) -> list[BenchPair]:
    root = Path(root)
    pairs = []
    for child in sorted(p for p in root.iterdir() if p.is_dir()) if root.is_dir() else []:
        paper = next((child / n for n in PAPER_NAMES if (child / n).is_file()), None)
        if paper is None:
            continue
        ref = child / REFERENCE_NAME
        pairs.append(BenchPair(child.name, paper, ref if ref.is_file() else None))
    if not pairs:
        raise ContractError(f"no pairs found in {root}")
    return pairs


def run_pair(
    pair: BenchPair, config: RunConfig, out_dir: Path, gateways: GatewayFactory, with_quiz: bool
) -> dict:
    """One row: metrics, optional quiz table, generation tokens, cost and time."""
    row: dict = {"id": pair.pair_id, "status": "ok", "error": ""}
    workdir = Path(out_dir) / pair.pair_id
    try:
        start = time.perf_counter()
        result = cmd_generate(pair.paper, config, workdir, gateway=gateways("generate"))
        elapsed = time.perf_counter() - start
        total = result.ledger.total()
        row["Input Tokens"] = total.input_tokens
        row["Output Tokens"] = total.output_tokens
        row["Cost (USD)"] = compute_cost(result.ledger, config.descriptors())
        row["Time (s)"] = elapsed
        report = cmd_evaluate(result.poster, pair.reference, config, gateway=gateways("evaluate"))
        row.update(report.row())
        if with_quiz:
            quiz_gateway = gateways("quiz")
            cmd_quiz_gen(pair.paper, config, workdir, quiz_gateway)
            cmd_quiz_run(result.poster, config, workdir, quiz_gateway)
            row.update({f"Quiz {k}": v for k, v in cmd_quiz_score(result.poster, config, workdir).row().items()})
    except Exception as exc:  # a failed pair must not stop the batch
        log.error("pair %s failed: %s", pair.pair_id, exc)
        row["status"] = "failed"
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


@dataclass(frozen=True)
class BenchResult:
    rows: list[dict]
    mean: dict
    columns: list[str]

    @property
    def failed(self) -> list[str]:
        return [r["id"] for r in self.rows if r["status"] != "ok"]


def cmd_bench(
    root: Path,
    config: RunConfig,
    out_dir: Path,
    *,
    with_quiz: bool = False,
    workers: Optional[int] = None,
    gateways: Optional[GatewayFactory] = None,
) -> BenchResult:
    """Run every pair and write ``bench.json`` and ``bench.csv`` (pair rows plus a mean row).

    The mean row averages successful pairs only.
    """
    pairs = discover_pairs(root)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    gateways = gateways or (lambda _purpose: config.make_gateway())
    workers = workers or config.bench.workers

    def run(pair: BenchPair) -> dict:
        return run_pair(pair, config, out_dir, gateways, with_quiz)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(run, pairs))
    else:
        rows = [run(p) for p in pairs]

    quiz_columns = []
    for row in rows:
        for key in row:
            if key not in quiz_columns and key not in METRIC_COLUMNS and key not in COST_COLUMNS and key not in ("id", "status", "error"):
                quiz_columns.append(key)
    value_columns = [*METRIC_COLUMNS, *quiz_columns, *COST_COLUMNS]
    ok = [r for r in rows if r["status"] == "ok"]
    mean = {"id": "mean", "status": f"{len(ok)}/{len(rows)} ok", "error": "", **mean_row(ok, value_columns)}
    columns = ["id", "status", *value_columns, "error"]
    write_csv([*rows, mean], out_dir / "bench.csv", columns)
    (out_dir / "bench.json").write_text(json.dumps({"rows": rows, "mean": mean}, indent=2))
    return BenchResult(rows, mean, columns)
