"""Six-criterion rubric scoring of a poster image by a vision model."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from statistics import fmean
from typing import Mapping, Optional

from .. import prompts
from ..errors import JSONParseError, SchemaValidationError
from ..gateway import JUDGE_CRITERIA, Gateway, ModelRequest
from ..imaging import ImageInput, image_bytes

log = logging.getLogger(__name__)

AESTHETIC = JUDGE_CRITERIA[:3]
INFORMATION = JUDGE_CRITERIA[3:]

DISPLAY_NAMES = {
    "element_quality": "Element Quality",
    "layout_balance": "Layout Balance",
    "engagement": "Engagement",
    "clarity": "Clarity",
    "content_completeness": "Content Completeness",
    "logical_flow": "Logical Flow",
}


@dataclass(frozen=True)
class JudgeScore:
    criterion: str
    reason: str
    score: int

    def __post_init__(self) -> None:
        if self.criterion not in JUDGE_CRITERIA:
            raise ValueError(f"unknown criterion {self.criterion!r}")
        if not 1 <= self.score <= 5:
            raise ValueError("score must lie in 1..5")


@dataclass(frozen=True)
class JudgeAggregate:
    aesthetic: Optional[float]
    information: Optional[float]
    overall: Optional[float]


@dataclass(frozen=True)
class JudgeResult:
    scores: dict[str, JudgeScore]
    missing: tuple[str, ...] = ()
    aggregate: JudgeAggregate = field(default_factory=lambda: JudgeAggregate(None, None, None))

    @property
    def complete(self) -> bool:
        return not self.missing


def _mean(values) -> Optional[float]:
    values = [v for v in values if v is not None]
    return fmean(values) if values else None


def aggregate_judge(scores: Mapping[str, Optional[float]]) -> JudgeAggregate:
    """Group means and the mean of all six; missing criteria are left out of every mean."""
    unknown = set(scores) - set(JUDGE_CRITERIA)
    if unknown:
        raise ValueError(f"unknown criteria {sorted(unknown)}")
    return JudgeAggregate(
        _mean(scores.get(c) for c in AESTHETIC),
        _mean(scores.get(c) for c in INFORMATION),
        _mean(scores.get(c) for c in JUDGE_CRITERIA),
    )


def _judge_one(criterion: str, poster: bytes, gateway: Gateway) -> Optional[JudgeScore]:
    request = ModelRequest(
        role_tag=f"judge.{criterion}",
        system_prompt=prompts.render(f"judge_{criterion}.system"),
        user_prompt=prompts.render("judge.user"),
        images=(poster,),
        expect_json=True,
    )
    try:
        out = gateway.complete_json(request, "judge")
    except (JSONParseError, SchemaValidationError) as exc:
        log.warning("judge criterion %s unusable after reprompt: %s", criterion, exc)
        return None
    return JudgeScore(criterion, out.reason, out.score)


def judge_poster(poster: ImageInput, gateway: Gateway, parallel: bool = False) -> JudgeResult:
    """One vision call per criterion; unusable criteria are reported as missing."""
    data = image_bytes(poster)
    if parallel:
        with ThreadPoolExecutor(max_workers=len(JUDGE_CRITERIA)) as pool:
            results = list(pool.map(lambda c: _judge_one(c, data, gateway), JUDGE_CRITERIA))
    else:
        results = [_judge_one(c, data, gateway) for c in JUDGE_CRITERIA]
    scores = {c: r for c, r in zip(JUDGE_CRITERIA, results) if r is not None}
    missing = tuple(c for c, r in zip(JUDGE_CRITERIA, results) if r is None)
    aggregate = aggregate_judge({c: float(s.score) for c, s in scores.items()})
    return JudgeResult(scores, missing, aggregate)
