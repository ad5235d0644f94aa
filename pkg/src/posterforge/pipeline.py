"""End-to-end poster generation with per-stage artifacts and resume.

Working directory layout::

    assets/conversion/   converter output and conversion.json
    assets/outline.json  summarized library (no assets yet)
    assets/library.json  filtered library plus images/
    assets/matches.json  asset-to-section assignment
    layout.json          panel layout
    panels/<i>/          crops per critique iteration and result.json
    poster.pptx          assembled poster, with a poster.png preview
    tokens.json          cumulative token ledger and cost
    manifest.json        stage flags, artifact paths, timings
"""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Optional

from .config import RunConfig
from .errors import ConfigurationError, StageError
from .gateway import GENERATE_ROLES, Gateway, TokenLedger, export_ledger
from .layout import (
    AssetMatch,
    LayoutPlan,
    build_layout,
    estimate_weights,
    load_layout,
    match_assets,
    save_layout,
)
from .painter import (
    FitCritic,
    PaintResult,
    VisionCritic,
    assemble_poster,
    load_paint,
    make_renderer,
    paint_poster,
    rasterize_poster,
)
from .parser import (
    AssetLibrary,
    ConversionResult,
    convert_pdf,
    filter_assets,
    ingest_markdown,
    load_conversion,
    load_library,
    save_conversion,
    save_library,
    summarize_document,
)

log = logging.getLogger(__name__)

STAGES = ("parsed", "summarized", "filtered", "matched", "laid_out", "painted", "assembled")
STAGE_EXIT_CODES = {stage: 10 + i for i, stage in enumerate(STAGES)}

POSTER_NAME = "poster.pptx"
PREVIEW_NAME = "poster.png"


@dataclass
class Workdir:
    root: Path

    def __post_init__(self) -> None:
        self.root = Path(self.root)

    @property
    def assets(self) -> Path:
        return self.root / "assets"

    @property
    def conversion(self) -> Path:
        return self.assets / "conversion" / "conversion.json"

    @property
    def outline(self) -> Path:
        return self.assets / "outline.json"

    @property
    def library(self) -> Path:
        return self.assets / "library.json"

    @property
    def matches(self) -> Path:
        return self.assets / "matches.json"

    @property
    def layout(self) -> Path:
        return self.root / "layout.json"

    @property
    def panels(self) -> Path:
        return self.root / "panels"

    @property
    def poster(self) -> Path:
        return self.root / POSTER_NAME

    @property
    def preview(self) -> Path:
        return self.root / PREVIEW_NAME

    @property
    def quiz(self) -> Path:
        return self.root / "quiz"

    @property
    def reports(self) -> Path:
        return self.root / "reports"

    @property
    def tokens(self) -> Path:
        return self.root / "tokens.json"

    @property
    def manifest(self) -> Path:
        return self.root / "manifest.json"


@dataclass
class RunManifest:
    source: str = ""
    stages: dict[str, dict[str, Any]] = field(default_factory=dict)
    ledger: dict[str, Any] = field(default_factory=dict)

    def done(self, stage: str) -> bool:
        return bool(self.stages.get(stage, {}).get("done"))

    def mark(self, stage: str, seconds: float, artifacts: list[Path], root: Path) -> None:
        self.stages[stage] = {
            "done": True,
            "seconds": round(seconds, 4),
            "artifacts": [str(Path(a).relative_to(root)) for a in artifacts],
        }

    def invalidate_from(self, stage: str) -> None:
        for s in STAGES[STAGES.index(stage) :]:
            self.stages.pop(s, None)

    @property
    def complete(self) -> bool:
        return all(self.done(s) for s in STAGES)

    def save(self, path: Path) -> None:
        path.write_text(json.dumps({"source": self.source, "stages": self.stages, "ledger": self.ledger}, indent=2))

    @classmethod
    def load(cls, path: Path) -> RunManifest:
        if not path.is_file():
            return cls()
        try:
            data = json.loads(path.read_text())
            return cls(data.get("source", ""), dict(data.get("stages", {})), dict(data.get("ledger", {})))
        except (ValueError, AttributeError):
            log.warning("unreadable manifest %s; starting over", path)
            return cls()


@dataclass
class GenerateResult:
    workdir: Workdir
    manifest: RunManifest
    executed: list[str]
    library: AssetLibrary
    plan: LayoutPlan
    paint: PaintResult
    ledger: TokenLedger

    @property
    def poster(self) -> Path:
        return self.workdir.poster


def _save_json(path: Path, data) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2, ensure_ascii=False))
    return path


def _load_outline(path: Path) -> AssetLibrary:
    return AssetLibrary.from_dict(json.loads(path.read_text()))


def _required_roles(config: RunConfig) -> list[str]:
    roles = list(GENERATE_ROLES)
    if config.painter.critic != "vision":
        roles.remove("commenter.critique")
    return roles


class _Run:
    """State shared by the stages of one generate invocation."""

    def __init__(self, source: Path, config: RunConfig, wd: Workdir, gateway: Gateway):
        self.source = source
        self.config = config
        self.wd = wd
        self.gateway = gateway
        self.conversion: Optional[ConversionResult] = None
        self.outline: Optional[AssetLibrary] = None
        self.library: Optional[AssetLibrary] = None
        self.matches: Optional[AssetMatch] = None
        self.plan: Optional[LayoutPlan] = None
        self.paint: Optional[PaintResult] = None

    # Each stage has a runner that produces its artifacts and a loader that
    # re-validates them; the loader doubles as the resume check.

    def run_parsed(self) -> list[Path]:
        out_dir = self.wd.conversion.parent
        if self.source.suffix.lower() in (".md", ".markdown"):
            self.conversion = ingest_markdown(self.source)
        else:
            c = self.config.converter
            self.conversion = convert_pdf(self.source, out_dir, command=c.command, timeout=c.timeout)
        save_conversion(self.conversion, self.wd.conversion)
        return [self.wd.conversion]

    def load_parsed(self) -> None:
        self.conversion = load_conversion(self.wd.conversion)

    def run_summarized(self) -> list[Path]:
        self.outline = summarize_document(self.conversion.document, self.gateway)
        return [_save_json(self.wd.outline, self.outline.to_dict())]

    def load_summarized(self) -> None:
        self.outline = _load_outline(self.wd.outline)

    def run_filtered(self) -> list[Path]:
        candidates = self.outline.with_assets(self.conversion.figures, self.conversion.tables)
        filtered = filter_assets(candidates, self.gateway)
        self.library = save_library(filtered, self.wd.assets)
        return [self.wd.library]

    def load_filtered(self) -> None:
        self.library = load_library(self.wd.assets)

    def run_matched(self) -> list[Path]:
        self.matches = match_assets(self.library, self.gateway)
        return [_save_json(self.wd.matches, self.matches.to_dict())]

    def load_matched(self) -> None:
        self.matches = AssetMatch.from_dict(json.loads(self.wd.matches.read_text()))
        for i in self.matches:
            if self.matches.resolve(self.library, i) is None or i >= len(self.library.body_sections):
                raise ValueError(f"stale match for section {i}")

    def run_laid_out(self) -> list[Path]:
        lc = self.config.layout
        weights = estimate_weights(self.library, self.matches, lam=lc.lam)
        layout = build_layout(weights, self.config.geometry.build(), lc.a_min, lc.a_max)
        self.plan = LayoutPlan(layout, self.matches, tuple(weights))
        save_layout(self.plan, self.wd.layout)
        return [self.wd.layout]

    def load_laid_out(self) -> None:
        self.plan = load_layout(self.wd.layout, expected_sections=len(self.library.body_sections))

    def run_painted(self) -> list[Path]:
        pc = self.config.painter
        critic = VisionCritic(self.gateway) if pc.critic == "vision" else FitCritic()
        self.paint = paint_poster(
            self.plan, self.library, self.gateway,
            assets_dir=self.wd.assets, panels_dir=self.wd.panels, critic=critic,
            renderer=make_renderer(pc.render_command), max_iters=pc.max_iters,
            parallel=pc.parallel, workers=pc.workers,
        )
        return [self.wd.panels / "title" / "fragment.json"] + [
            self.wd.panels / str(r.panel_index) / "result.json" for r in self.paint.panels
        ]

    def load_painted(self) -> None:
        self.paint = load_paint(self.wd.panels, len(self.plan.layout.panels))

    def run_assembled(self) -> list[Path]:
        geometry = self.plan.layout.geometry
        assemble_poster(self.paint.fragments, geometry, self.wd.poster)
        rasterize_poster(self.paint.fragments, geometry).save(self.wd.preview)
        return [self.wd.poster, self.wd.preview]

    def load_assembled(self) -> None:
        from pptx import Presentation

        Presentation(str(self.wd.poster))
        if not self.wd.preview.is_file():
            raise FileNotFoundError(self.wd.preview)


def cmd_generate(
    paper: Path,
    config: RunConfig,
    workdir: Optional[Path] = None,
    resume: bool = True,
    gateway: Optional[Gateway] = None,
    on_stage: Optional[Callable[[str], None]] = None,
) -> GenerateResult:
    """Run every stage not already completed and valid in ``workdir``.

    Stages before the first missing or invalid artifact are loaded from disk;
    that stage and all later ones are re-executed.
    """
    paper = Path(paper)
    root = Path(workdir or config.workdir or "run")
    gateway = gateway or config.make_gateway()
    gateway.require_roles(_required_roles(config))
    if not paper.is_file():
        raise ConfigurationError(f"paper not found: {paper}")
    wd = Workdir(root)
    root.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest.load(wd.manifest) if resume else RunManifest()
    if manifest.source and manifest.source != str(paper.resolve()):
        log.warning("workdir was built from %s; starting over for %s", manifest.source, paper)
        manifest = RunManifest()
    manifest.source = str(paper.resolve())

    prior = TokenLedger.from_dict(json.loads(wd.tokens.read_text())) if resume and wd.tokens.is_file() else TokenLedger()
    run = _Run(paper, config, wd, gateway)
    executed: list[str] = []
    rerun = False
    for stage in STAGES:
        if not rerun and manifest.done(stage):
            try:
                getattr(run, f"load_{stage}")()
                continue
            except Exception as exc:  # any failure to reload means the artifact is stale
                log.info("stage %s needs to run again: %s", stage, exc)
        rerun = True
        manifest.invalidate_from(stage)
        if on_stage:
            on_stage(stage)
        start = time.perf_counter()
        try:
            artifacts = getattr(run, f"run_{stage}")()
        except Exception as exc:
            _finish(manifest, wd, prior, gateway, config)
            raise StageError(stage, exc) from exc
        manifest.mark(stage, time.perf_counter() - start, artifacts, root)
        executed.append(stage)
        manifest.save(wd.manifest)
    ledger = _finish(manifest, wd, prior, gateway, config)
    return GenerateResult(wd, manifest, executed, run.library, run.plan, run.paint, ledger)


def _finish(manifest: RunManifest, wd: Workdir, prior: TokenLedger, gateway: Gateway, config: RunConfig) -> TokenLedger:
    ledger = prior.merge(gateway.ledger)
    manifest.ledger = export_ledger(ledger, config.descriptors(), wd.tokens)
    manifest.save(wd.manifest)
    return ledger
