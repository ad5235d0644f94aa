"""Score one generated poster against an optional reference poster."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

from .config import EvaluationConfig, RunConfig
from .errors import CapabilityError, MetricError
from .gateway import JUDGE_CRITERIA, Gateway
from .layout import load_layout
from .metrics import (
    METRIC_COLUMNS,
    FigureTextPair,
    HFCausalLM,
    MetricReport,
    UniformLM,
    extract_poster_text,
    figure_relevance,
    judge_poster,
    make_embedder,
    perplexity,
    visual_similarity,
    write_csv,
)
from .metrics.embedding import Embedder
from .metrics.perplexity import LanguageModel
from .parser import load_library, resolve_file

log = logging.getLogger(__name__)

IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg", ".webp", ".bmp")


@dataclass(frozen=True)
class PosterInput:
    """A poster as its image (for vision metrics) and its text source (pptx or image)."""

    source: Path
    image: Path

    @classmethod
    def resolve(cls, path: Union[str, Path]) -> PosterInput:
        path = Path(path)
        if not path.is_file():
            raise CapabilityError(f"poster not found: {path}")
        if path.suffix.lower() in IMAGE_SUFFIXES:
            return cls(path, path)
        if path.suffix.lower() == ".pptx":
            for candidate in (path.with_suffix(".png"), path.parent / "poster.png"):
                if candidate.is_file():
                    return cls(path, candidate)
            raise CapabilityError(f"no rendered image next to {path}; expected {path.with_suffix('.png').name}")
        raise CapabilityError(f"unsupported poster format: {path.suffix}")


def make_lm(config: EvaluationConfig) -> LanguageModel:
    if config.lm.kind == "hf":
        return HFCausalLM(config.lm.model)
    return UniformLM(config.lm.vocab_size)


def make_config_embedder(config: EvaluationConfig) -> Embedder:
    if config.embedder == "altclip":
        return make_embedder("altclip", model_name=config.embedder_model)
    return make_embedder("mock")


def workdir_figure_pairs(workdir: Path) -> Optional[list[FigureTextPair]]:
    """Figure/section-text pairs of a poster generated in ``workdir``, or None if it is not one.

    Each matched asset is paired with the synopsis of its section.
    """
    workdir = Path(workdir)
    assets_dir = workdir / "assets"
    if not (workdir / "layout.json").is_file() or not (assets_dir / "library.json").is_file():
        return None
    library = load_library(assets_dir)
    plan = load_layout(workdir / "layout.json", expected_sections=len(library.body_sections))
    pairs = []
    for index in plan.matches:
        asset = plan.matches.resolve(library, index)
        text = library.body_sections[index].content
        if asset is not None and text.strip():
            pairs.append(FigureTextPair(str(resolve_file(asset, assets_dir)), text))
    return pairs


def evaluate_poster(
    gen: Union[str, Path],
    gt: Optional[Union[str, Path]],
    gateway: Gateway,
    config: EvaluationConfig,
    *,
    embedder: Optional[Embedder] = None,
    lm: Optional[LanguageModel] = None,
    figure_pairs: Optional[list[FigureTextPair]] = None,
) -> MetricReport:
    """All metrics for one poster; a metric that cannot be computed is left blank with a note."""
    poster = PosterInput.resolve(gen)
    embedder = embedder or make_config_embedder(config)
    lm = lm or make_lm(config)
    report = MetricReport()

    if gt is None:
        report.notes.append("no ground-truth poster; visual similarity omitted")
    else:
        reference = PosterInput.resolve(gt)
        report.visual_similarity = visual_similarity(poster.image, reference.image, embedder)

    try:
        text = extract_poster_text(poster.source, config.ocr_command)
        report.ppl = perplexity(text, lm)
    except (CapabilityError, MetricError) as exc:
        report.notes.append(f"perplexity omitted: {exc}")

    if figure_pairs is None:
        figure_pairs = workdir_figure_pairs(poster.source.parent)
    if figure_pairs is None:
        report.notes.append("figure placement unknown; figure relevance omitted")
    else:
        report.figure_relevance = figure_relevance(figure_pairs, embedder)

    report.set_judge(judge_poster(poster.image, gateway, parallel=config.judge_parallel))
    return report


def cmd_evaluate(
    gen: Union[str, Path],
    gt: Optional[Union[str, Path]],
    config: RunConfig,
    *,
    reports_dir: Optional[Path] = None,
    gateway: Optional[Gateway] = None,
    embedder: Optional[Embedder] = None,
    lm: Optional[LanguageModel] = None,
) -> MetricReport:
    """Evaluate and write ``metrics.json`` plus a one-row ``metrics.csv``."""
    gateway = gateway or config.make_gateway()
    gateway.require_roles([f"judge.{c}" for c in JUDGE_CRITERIA])
    report = evaluate_poster(gen, gt, gateway, config.evaluation, embedder=embedder, lm=lm)
    out = Path(reports_dir) if reports_dir else Path(gen).parent / "reports"
    report.save(out / "metrics.json")
    write_csv([report.row()], out / "metrics.csv", METRIC_COLUMNS)
    log.info("metrics written to %s", out)
    return report

