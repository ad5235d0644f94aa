"""Raw and density-augmented quiz scores and their reader-group aggregation."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from statistics import fmean
from typing import Optional, Sequence

from ..errors import ConfigurationError, ContractError
from .models import QUIZ_KINDS, QUIZ_SIZE, QuizKind, QuizSet, ReaderAnswer

DEFAULT_W = 774.0


def score_raw(answers: Sequence[ReaderAnswer], quiz: QuizSet) -> float:
    """Percentage of questions whose answer letter matches the key; NA is wrong."""
    given = {a.question_id: a.answer for a in answers}
    missing = [it.qid for it in quiz.items if it.qid not in given]
    if missing:
        raise ContractError(f"answers missing for {missing[:5]}")
    correct = sum(1 for it in quiz.items if given[it.qid] == it.answer_letter)
    return 100.0 * correct / QUIZ_SIZE


def density_augmented(s_r: float, l: float, w: float) -> float:
    """``s_r * (1 + 1 / max(1, l / w))``: up to double credit for posters no longer than ``w``."""
    if w <= 0:
        raise ConfigurationError("reference poster length w must be positive")
    if l < 0:
        raise ContractError("poster length l must be non-negative")
    return s_r * (1.0 + 1.0 / max(1.0, l / w))


@dataclass(frozen=True)
class QuizScore:
    reader: str
    kind: QuizKind
    s_r: float
    l: float
    w: float
    s_a: float
    group: str = "all"

    @classmethod
    def compute(cls, reader: str, kind: QuizKind, answers, quiz: QuizSet, l: float, w: float = DEFAULT_W, group: str = "all") -> QuizScore:
        s_r = score_raw(answers, quiz)
        return cls(reader, kind, s_r, l, w, density_augmented(s_r, l, w), group)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class QuizTable:
    groups: tuple[str, ...]
    raw: dict[str, dict[str, float]]  # kind -> group -> mean s_r
    raw_avg: dict[str, float]  # kind -> mean over groups
    density_avg: dict[str, float]
    overall_raw: float
    overall_density: float

    def columns(self) -> list[str]:
        cols = []
        for kind, short in (("verbatim", "V"), ("interpretive", "I")):
            cols += [f"{kind.capitalize()} {g}" for g in self.groups] + [f"{short}-Avg"]
        return cols + ["Overall", "DA V-Avg", "DA I-Avg", "DA Overall"]

    def row(self) -> dict[str, Optional[float]]:
        out: dict[str, Optional[float]] = {}
        for kind, short in (("verbatim", "V"), ("interpretive", "I")):
            for g in self.groups:
                out[f"{kind.capitalize()} {g}"] = self.raw.get(kind, {}).get(g)
            out[f"{short}-Avg"] = self.raw_avg.get(kind)
        out["Overall"] = self.overall_raw
        out["DA V-Avg"] = self.density_avg.get("verbatim")
        out["DA I-Avg"] = self.density_avg.get("interpretive")
        out["DA Overall"] = self.overall_density
        return out


def aggregate_scores(scores: Sequence[QuizScore], group_order: Optional[Sequence[str]] = None) -> QuizTable:
    """Mean per reader group, then mean over groups per kind, then mean of the two kinds.

    Density-augmented averages follow the same two-level scheme.
    """
    if not scores:
        raise ContractError("no reader results to aggregate")
    groups = list(group_order) if group_order else sorted({s.group for s in scores})
    raw: dict[str, dict[str, float]] = {}
    dens: dict[str, dict[str, float]] = {}
    for kind in QUIZ_KINDS:
        for g in groups:
            sel = [s for s in scores if s.kind == kind and s.group == g]
            if sel:
                raw.setdefault(kind, {})[g] = fmean(s.s_r for s in sel)
                dens.setdefault(kind, {})[g] = fmean(s.s_a for s in sel)
    raw_avg = {k: fmean(v.values()) for k, v in raw.items()}
    dens_avg = {k: fmean(v.values()) for k, v in dens.items()}
    return QuizTable(
        tuple(groups), raw, raw_avg, dens_avg, fmean(raw_avg.values()), fmean(dens_avg.values())
    )
