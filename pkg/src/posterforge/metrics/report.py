from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from statistics import fmean
from typing import Iterable, Optional, Sequence

from ..gateway import JUDGE_CRITERIA
from .judge import DISPLAY_NAMES, JudgeResult

METRIC_COLUMNS = [
    "Vis. Sim.",
    "PPL",
    "Fig. Rel.",
    *(DISPLAY_NAMES[c] for c in JUDGE_CRITERIA),
    "Aesthetic",
    "Information",
    "Overall",
]


@dataclass
class MetricReport:
    visual_similarity: Optional[float] = None
    figure_relevance: Optional[float] = None
    ppl: Optional[float] = None
    judge: dict[str, dict] = field(default_factory=dict)  # criterion -> {"reason", "score"}
    judge_missing: list[str] = field(default_factory=list)
    aesthetic_avg: Optional[float] = None
    information_avg: Optional[float] = None
    overall: Optional[float] = None
    notes: list[str] = field(default_factory=list)

    @property
    def complete(self) -> bool:
        return not self.judge_missing and len(self.judge) == len(JUDGE_CRITERIA)

    def set_judge(self, result: JudgeResult) -> None:
        self.judge = {c: {"reason": s.reason, "score": s.score} for c, s in result.scores.items()}
        self.judge_missing = list(result.missing)
        self.aesthetic_avg = result.aggregate.aesthetic
        self.information_avg = result.aggregate.information
        self.overall = result.aggregate.overall
        if result.missing:
            self.notes.append("judge incomplete: missing " + ", ".join(result.missing))

    def to_dict(self) -> dict:
        data = asdict(self)
        data["complete"] = self.complete
        return data

    def save(self, path: Path) -> None:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(json.dumps(self.to_dict(), indent=2))

    @classmethod
    def load(cls, path: Path) -> MetricReport:
        data = json.loads(Path(path).read_text())
        data.pop("complete", None)
        return cls(**data)

    def row(self) -> dict[str, Optional[float]]:
        values = [
            self.visual_similarity,
            self.ppl,
            self.figure_relevance,
            *(self.judge.get(c, {}).get("score") for c in JUDGE_CRITERIA),
            self.aesthetic_avg,
            self.information_avg,
            self.overall,
        ]
        return dict(zip(METRIC_COLUMNS, values))


def mean_row(rows: Sequence[dict], columns: Sequence[str]) -> dict:
    """Column-wise mean ignoring blanks; non-numeric columns are left empty."""
    out = {}
    for col in columns:
        values = [r.get(col) for r in rows]
        nums = [float(v) for v in values if isinstance(v, (int, float)) and not isinstance(v, bool)]
        out[col] = fmean(nums) if nums else None
    return out


def write_csv(rows: Iterable[dict], path: Path, columns: Sequence[str]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(columns), extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: ("" if row.get(k) is None else row.get(k)) for k in columns})
