"""Bitmap previews of panel fragments.

The built-in rasterizer draws fragments with Pillow using the glyph width
and line height of the fit estimate, so estimated overflow shows up in the
crop. An external page-render command can replace it when an office
renderer is available.
"""

from __future__ import annotations

import shlex
import subprocess
import tempfile
import textwrap
from functools import lru_cache
from pathlib import Path
from typing import Optional, Sequence, Union

from PIL import Image, ImageDraw, ImageFont

from ..errors import RenderError
from ..layout.tree import Box, PosterGeometry
from .fit import BULLET_PREFIX, GLYPH_WIDTH, LINE_HEIGHT, scaled_size
from .render import PanelFragment, ShapeSpec, assemble_poster

CROP_MARGIN = 0.05
BOX_COLOR = (220, 0, 0)
PANEL_COLOR = (90, 90, 90)
MAX_CROP_SIDE = 1024


@lru_cache(maxsize=128)
def _font(size: int) -> ImageFont.ImageFont:
    return ImageFont.load_default(size=max(1, size))


def _wrap(text: str, per_line: int) -> list[str]:
    return textwrap.wrap(text, width=per_line) or [""]


def _draw_text(draw: ImageDraw.ImageDraw, spec: ShapeSpec, origin: tuple[float, float], zoom: float) -> None:
    scale = spec.font_scale if spec.role == "textbox" else 1.0
    y = spec.box.y
    for item in spec.items:
        size = scaled_size(item.font_size, scale)
        indent = size * item.level
        width = max(spec.box.w - indent, 1.0)
        per_line = max(1, int(width // (GLYPH_WIDTH * size)))
        prefix = len(BULLET_PREFIX) if item.bullet else 0
        font = _font(max(1, round(size * zoom)))
        if item.bullet:
            r = 0.15 * size
            cx, cy = spec.box.x + indent + 0.3 * size, y + 0.6 * size
            draw.ellipse([(cx - r - origin[0]) * zoom, (cy - r - origin[1]) * zoom,
                          (cx + r - origin[0]) * zoom, (cy + r - origin[1]) * zoom], fill=(0, 0, 0))
        indent_x = prefix * GLYPH_WIDTH * size  # hanging indent after the bullet
        for line in _wrap(item.text, max(1, per_line - prefix)):
            if item.alignment == "left":
                x = spec.box.x + indent + indent_x
            else:
                line_w = len(line) * GLYPH_WIDTH * size
                slack = max(width - indent_x - line_w, 0.0)
                x = spec.box.x + indent + indent_x + (slack / 2 if item.alignment == "center" else slack)
            draw.text(((x - origin[0]) * zoom, (y - origin[1]) * zoom), line, fill=(0, 0, 0), font=font)
            y += LINE_HEIGHT * size


def _draw_box(draw: ImageDraw.ImageDraw, box: Box, origin, zoom: float, color, width: int) -> None:
    x0, y0 = (box.x - origin[0]) * zoom, (box.y - origin[1]) * zoom
    draw.rectangle([x0, y0, x0 + box.w * zoom, y0 + box.h * zoom], outline=color, width=width)


def draw_fragment(image: Image.Image, fragment: PanelFragment, origin=(0.0, 0.0), zoom: float = 1.0) -> None:
    draw = ImageDraw.Draw(image)
    _draw_box(draw, fragment.bbox, origin, zoom, PANEL_COLOR, max(1, round(2 * zoom)))
    for spec in fragment.shapes:
        if spec.role == "picture":
            try:
                with Image.open(spec.image) as pic:
                    size = (max(1, round(spec.box.w * zoom)), max(1, round(spec.box.h * zoom)))
                    image.paste(pic.convert("RGB").resize(size), (round((spec.box.x - origin[0]) * zoom), round((spec.box.y - origin[1]) * zoom)))
            except (OSError, ValueError) as exc:
                raise RenderError(f"cannot draw asset {spec.image}: {exc}", fragment.panel_index) from exc
        else:
            _draw_text(draw, spec, origin, zoom)


def rasterize_poster(fragments: Sequence[PanelFragment], geometry: PosterGeometry, zoom: float = 0.5) -> Image.Image:
    size = (max(1, round(geometry.width_px * zoom)), max(1, round(geometry.height_px * zoom)))
    image = Image.new("RGB", size, "white")
    for fragment in sorted(fragments, key=lambda f: f.panel_index):
        draw_fragment(image, fragment, zoom=zoom)
    return image


def crop_window(bbox: Box, geometry: PosterGeometry, margin: float = CROP_MARGIN) -> Box:
    """Panel bbox grown by ``margin`` of the poster width on every side, clipped to the canvas."""
    m = margin * geometry.width_px
    x0, y0 = max(0.0, bbox.x - m), max(0.0, bbox.y - m)
    x1 = min(float(geometry.width_px), bbox.x + bbox.w + m)
    y1 = min(float(geometry.height_px), bbox.y + bbox.h + m)
    return Box(x0, y0, x1 - x0, y1 - y0)


def _mark_textboxes(image: Image.Image, fragment: PanelFragment, origin, zoom: float) -> None:
    draw = ImageDraw.Draw(image)
    for spec in fragment.textboxes:
        _draw_box(draw, spec.box, origin, zoom, BOX_COLOR, max(2, round(4 * zoom)))


def _fit_zoom(window: Box, max_side: int) -> float:
    return min(1.0, max_side / max(window.w, window.h))


class PillowRenderer:
    """Draws a single fragment directly; no document round trip."""

    def panel_crop(self, fragment: PanelFragment, geometry: PosterGeometry, max_side: int = MAX_CROP_SIDE) -> Image.Image:
        window = crop_window(fragment.bbox, geometry)
        zoom = _fit_zoom(window, max_side)
        image = Image.new("RGB", (max(1, round(window.w * zoom)), max(1, round(window.h * zoom))), "white")
        origin = (window.x, window.y)
        draw_fragment(image, fragment, origin, zoom)
        _mark_textboxes(image, fragment, origin, zoom)
        return image


class CommandRenderer:
    """Renders via an external command template with ``{input}``, ``{page}`` and ``{output}`` fields."""

    def __init__(self, command: Union[str, Sequence[str]], timeout: float = 300):
        self.command = command
        self.timeout = timeout

    def render_page(self, document: Path, output: Path, page: int = 0) -> Image.Image:
        parts = shlex.split(self.command) if isinstance(self.command, str) else list(self.command)
        argv = [p.format(input=str(document), page=page, output=str(output)) for p in parts]
        try:
            proc = subprocess.run(argv, capture_output=True, text=True, timeout=self.timeout)
        except (OSError, subprocess.TimeoutExpired) as exc:
            raise RenderError(f"render command could not run: {exc}") from exc
        if proc.returncode != 0 or not Path(output).is_file():
            raise RenderError(f"render command failed ({proc.returncode}): {proc.stderr.strip()}")
        with Image.open(output) as im:
            return im.convert("RGB")

    def panel_crop(self, fragment: PanelFragment, geometry: PosterGeometry, max_side: int = MAX_CROP_SIDE) -> Image.Image:
        with tempfile.TemporaryDirectory() as tmp:
            doc = assemble_poster([fragment], geometry, Path(tmp) / "panel.pptx")
            try:
                page = self.render_page(doc, Path(tmp) / "page.png")
            except RenderError as exc:
                raise RenderError(str(exc), fragment.panel_index) from exc
        sx, sy = page.width / geometry.width_px, page.height / geometry.height_px
        window = crop_window(fragment.bbox, geometry)
        crop = page.crop((round(window.x * sx), round(window.y * sy), round((window.x + window.w) * sx), round((window.y + window.h) * sy)))
        zoom = _fit_zoom(window, max_side)
        crop = crop.resize((max(1, round(window.w * zoom)), max(1, round(window.h * zoom))))
        _mark_textboxes(crop, fragment, (window.x, window.y), zoom)
        return crop


def make_renderer(command: Optional[Union[str, Sequence[str]]] = None):
    return CommandRenderer(command) if command else PillowRenderer()
