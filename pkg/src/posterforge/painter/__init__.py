"""Bullet composition, panel rendering and the critique loop."""

from .bullets import compose_bullets, decide_textbox_count, title_block
from .commenter import (
    CritiqueInput,
    FitCritic,
    References,
    VisionCritic,
    bundled_references,
    critique_panel,
    parse_verdict,
)
from .fit import Verdict, estimate_fit, needed_height
from .raster import CommandRenderer, PillowRenderer, make_renderer, rasterize_poster
from .refine import (
    PaintResult,
    PanelResult,
    RefinementState,
    composed_texts,
    drop_trailing_bullet,
    load_paint,
    paint_poster,
    refine_panel,
)
from .render import AssetRef, PanelFragment, PosterDocument, ShapeSpec, assemble_poster, layout_panel, shape_boxes

__all__ = [
    "AssetRef",
    "CommandRenderer",
    "CritiqueInput",
    "FitCritic",
    "PaintResult",
    "PanelFragment",
    "PanelResult",
    "PillowRenderer",
    "PosterDocument",
    "References",
    "RefinementState",
    "ShapeSpec",
    "Verdict",
    "VisionCritic",
    "assemble_poster",
    "bundled_references",
    "compose_bullets",
    "composed_texts",
    "critique_panel",
    "decide_textbox_count",
    "drop_trailing_bullet",
    "estimate_fit",
    "layout_panel",
    "load_paint",
    "make_renderer",
    "needed_height",
    "paint_poster",
    "parse_verdict",
    "rasterize_poster",
    "refine_panel",
    "shape_boxes",
    "title_block",
]
