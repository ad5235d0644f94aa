"""Render-critique loop per panel and painting of the whole poster."""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from ..errors import CompositionError, JSONParseError, RenderError, SchemaValidationError
from ..gateway import Gateway
from ..gateway.schemas import BulletBlock
from ..layout.store import LayoutPlan
from ..layout.tree import Panel, PosterGeometry, reading_order
from ..parser.library import AssetLibrary, SectionSynopsis, resolve_file
from .bullets import compose_bullets, decide_textbox_count, title_block
from .commenter import Critic, CritiqueInput, VisionCritic
from .fit import Verdict
from .raster import PillowRenderer
from .render import AssetRef, PanelFragment, layout_panel, panel_key

log = logging.getLogger(__name__)

DEFAULT_MAX_ITERS = 4
SHRINK = 0.85
GROW = 1.1
MIN_SCALE = 0.5
MAX_SCALE = 1.5


@dataclass
class RefinementState:
    panel_index: int
    iteration: int = 0
    font_scale: float = 1.0
    dropped_bullets: int = 0
    verdicts: list[int] = field(default_factory=list)
    modifications: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class PanelResult:
    panel_index: int
    composed: BulletBlock
    final: BulletBlock
    fragment: PanelFragment
    state: RefinementState

    def to_dict(self) -> dict:
        return {
            "panel_index": self.panel_index,
            "composed": self.composed.model_dump(exclude_none=True),
            "final": self.final.model_dump(exclude_none=True),
            "fragment": self.fragment.to_dict(),
            "state": asdict(self.state),
        }

    @classmethod
    def from_dict(cls, data: dict) -> PanelResult:
        return cls(
            int(data["panel_index"]),
            BulletBlock.model_validate(data["composed"]),
            BulletBlock.model_validate(data["final"]),
            PanelFragment.from_dict(data["fragment"]),
            RefinementState(**data["state"]),
        )


def drop_trailing_bullet(block: BulletBlock) -> Optional[BulletBlock]:
    """Remove the last bullet among those at the deepest level, from every textbox alike.

    Returns None when only one bullet is left.
    """
    boxes = block.textboxes
    n = len(boxes[0])
    if n <= 1:
        return None
    levels = [max(box[j].level for box in boxes) for j in range(n)]
    deepest = max(levels)
    j = max(i for i, level in enumerate(levels) if level == deepest)
    trimmed = [box[:j] + box[j + 1 :] for box in boxes]
    return BulletBlock(title=block.title, textbox1=trimmed[0], textbox2=trimmed[1] if len(trimmed) > 1 else None)


def _apply(verdict: Verdict, block: BulletBlock, state: RefinementState) -> BulletBlock:
    if verdict == Verdict.OVERFLOW:
        shrunk = state.font_scale * SHRINK
        if shrunk >= MIN_SCALE:
            state.font_scale = shrunk
            state.modifications.append(f"font_scale -> {shrunk:.4f}")
            return block
        trimmed = drop_trailing_bullet(block)
        if trimmed is None:
            state.modifications.append("overflow with a single bullet left; no change")
            return block
        state.dropped_bullets += 1
        state.modifications.append("dropped trailing bullet")
        return trimmed
    if verdict == Verdict.TOO_BLANK:
        grown = min(MAX_SCALE, state.font_scale * GROW)
        if grown != state.font_scale:
            state.font_scale = grown
            state.modifications.append(f"font_scale -> {grown:.4f}")
        return block
    return block


def refine_panel(
    panel: Panel,
    section: SectionSynopsis,
    asset: Optional[AssetRef],
    gateway: Gateway,
    geometry: PosterGeometry,
    *,
    critic: Optional[Critic] = None,
    renderer=None,
    max_iters: int = DEFAULT_MAX_ITERS,
    block: Optional[BulletBlock] = None,
    crop_dir: Optional[Path] = None,
) -> PanelResult:
    """Compose bullets, then render and critique until Good or ``max_iters`` critiques.

    Overflow shrinks the font by 0.85, or drops the deepest trailing bullet
    once the scale would fall below 0.5; too-blank grows it by 1.1 up to 1.5.
    No change is applied after the final critique.
    """
    if max_iters < 1:
        raise ValueError("max_iters must be at least 1")
    critic = critic or VisionCritic(gateway)
    renderer = renderer or PillowRenderer()
    index = panel.section_index
    if block is None:
        n_boxes = decide_textbox_count(panel, asset is not None)
        try:
            block = compose_bullets(section, n_boxes, gateway)
        except (JSONParseError, SchemaValidationError) as exc:
            raise CompositionError(f"panel {index}: {exc}", index) from exc
    composed = block
    state = RefinementState(index)
    current = block
    fragment = None
    for k in range(1, max_iters + 1):
        try:
            fragment = layout_panel(panel, current, asset, state.font_scale)
            crop = renderer.panel_crop(fragment, geometry)
        except RenderError as exc:
            raise RenderError(str(exc), index) from exc
        if crop_dir is not None:
            crop_dir.mkdir(parents=True, exist_ok=True)
            crop.save(crop_dir / f"iter{k}.png")
        verdict = critic(CritiqueInput(index, crop, current, fragment.text_region, state.font_scale, fragment.gutter))
        state.iteration = k
        state.verdicts.append(int(verdict))
        if verdict == Verdict.GOOD or k == max_iters:
            break
        current = _apply(verdict, current, state)
    return PanelResult(index, composed, current, fragment, state)


@dataclass(frozen=True)
class PaintResult:
    title: PanelFragment
    panels: tuple[PanelResult, ...]

    @property
    def fragments(self) -> list[PanelFragment]:
        return [self.title, *(p.fragment for p in self.panels)]


def asset_ref(library: AssetLibrary, plan: LayoutPlan, index: int, assets_dir: Path) -> Optional[AssetRef]:
    asset = plan.matches.resolve(library, index)
    if asset is None:
        return None
    path = resolve_file(asset, assets_dir)
    if not path.is_file():
        raise RenderError(f"asset file missing: {path}", index)
    return AssetRef(str(path.resolve()), asset.width_px, asset.height_px)


def paint_poster(
    plan: LayoutPlan,
    library: AssetLibrary,
    gateway: Gateway,
    *,
    assets_dir: Path,
    panels_dir: Optional[Path] = None,
    critic: Optional[Critic] = None,
    renderer=None,
    max_iters: int = DEFAULT_MAX_ITERS,
    parallel: bool = False,
    workers: int = 4,
) -> PaintResult:
    """Refine every body panel (in reading order, or concurrently) and build the title panel."""
    layout = plan.layout
    body = library.body_sections
    if len(body) != len(layout.panels):
        raise RenderError(f"layout has {len(layout.panels)} panels for {len(body)} body sections")
    title_fragment = layout_panel(layout.title_panel, title_block(library.meta, layout.title_panel.bbox.h))
    by_index = {p.section_index: p for p in layout.panels}
    order = reading_order(layout.panels)

    def run(index: int) -> PanelResult:
        crop_dir = panels_dir / str(index) if panels_dir is not None else None
        result = refine_panel(
            by_index[index], body[index], asset_ref(library, plan, index, assets_dir), gateway, layout.geometry,
            critic=critic, renderer=renderer, max_iters=max_iters, crop_dir=crop_dir,
        )
        if crop_dir is not None:
            (crop_dir / "result.json").write_text(json.dumps(result.to_dict(), indent=2))
        return result

    if parallel and len(order) > 1:
        with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
            results = list(pool.map(run, order))
    else:
        results = [run(i) for i in order]
    if panels_dir is not None:
        title_dir = panels_dir / panel_key(title_fragment.panel_index)
        title_dir.mkdir(parents=True, exist_ok=True)
        (title_dir / "fragment.json").write_text(json.dumps(title_fragment.to_dict(), indent=2))
    return PaintResult(title_fragment, tuple(sorted(results, key=lambda r: r.panel_index)))


def load_paint(panels_dir: Path, n_panels: int) -> PaintResult:
    panels_dir = Path(panels_dir)
    title = PanelFragment.from_dict(json.loads((panels_dir / "title" / "fragment.json").read_text()))
    results = []
    for i in range(n_panels):
        data = json.loads((panels_dir / str(i) / "result.json").read_text())
        result = PanelResult.from_dict(data)
        if result.panel_index != i:
            raise ValueError(f"panels/{i}/result.json holds panel {result.panel_index}")
        results.append(result)
    for fragment in [title, *(r.fragment for r in results)]:
        for spec in fragment.shapes:
            if spec.image and not Path(spec.image).is_file():
                raise FileNotFoundError(spec.image)
    return PaintResult(title, tuple(results))


def composed_texts(result: PaintResult, order: Sequence[int]) -> list[str]:
    """Texts of the final blocks, title panel first, then panels in ``order``."""
    by_index = {r.panel_index: r for r in result.panels}
    texts = [it.text for spec in result.title.shapes for it in spec.items]
    for i in order:
        block = by_index[i].final
        texts += [it.text for it in block.title]
        for box in block.textboxes:
            texts += [it.text for it in box]
    return texts
