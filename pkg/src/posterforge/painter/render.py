"""Deterministic placement of panel content and the OOXML poster document.

Poster pixels map to points one to one (72 dpi), so a font size in the
bullet schema is both a pixel height and a point size.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Literal, Optional, Sequence

from pptx import Presentation
from pptx.enum.text import MSO_ANCHOR, MSO_AUTO_SIZE, PP_ALIGN
from pptx.oxml.xmlchemy import OxmlElement
from pptx.util import Emu, Pt

from ..errors import RenderError
from ..gateway.schemas import BulletBlock, BulletItem
from ..layout.tree import TITLE_INDEX, Box, Panel, PosterGeometry
from .fit import LINE_HEIGHT, item_lines, scaled_size

EMU_PER_PX = 12700
PAD_FRACTION = 0.02
TITLE_BAND_MAX = 0.25
TITLE_PANEL_BAND_MAX = 0.6
ASSET_MAX_SHARE = 0.5

ShapeRole = Literal["title", "textbox", "picture"]
_ALIGN = {"left": PP_ALIGN.LEFT, "center": PP_ALIGN.CENTER, "right": PP_ALIGN.RIGHT}


@dataclass(frozen=True)
class AssetRef:
    path: str
    width_px: int
    height_px: int

    @property
    def aspect(self) -> float:
        return self.width_px / self.height_px


@dataclass(frozen=True)
class ShapeSpec:
    name: str
    role: ShapeRole
    box: Box
    items: tuple[BulletItem, ...] = ()
    font_scale: float = 1.0
    image: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "role": self.role,
            "box": self.box.as_list(),
            "items": [it.model_dump(exclude_none=True) for it in self.items],
            "font_scale": self.font_scale,
            "image": self.image,
        }

    @classmethod
    def from_dict(cls, data: dict) -> ShapeSpec:
        return cls(
            data["name"], data["role"], Box(*data["box"]),
            tuple(BulletItem.model_validate(it) for it in data.get("items", [])),
            float(data.get("font_scale", 1.0)), data.get("image"),
        )


@dataclass(frozen=True)
class PanelFragment:
    """Everything one panel contributes to the poster; fragments of different panels never overlap."""

    panel_index: int
    bbox: Box
    shapes: tuple[ShapeSpec, ...]
    text_region: Box
    gutter: float = 0.0

    @property
    def textboxes(self) -> list[ShapeSpec]:
        return [s for s in self.shapes if s.role == "textbox"]

    def to_dict(self) -> dict:
        return {
            "panel_index": self.panel_index,
            "bbox": self.bbox.as_list(),
            "shapes": [s.to_dict() for s in self.shapes],
            "text_region": self.text_region.as_list(),
            "gutter": self.gutter,
        }

    @classmethod
    def from_dict(cls, data: dict) -> PanelFragment:
        return cls(
            int(data["panel_index"]), Box(*data["bbox"]),
            tuple(ShapeSpec.from_dict(s) for s in data["shapes"]),
            Box(*data["text_region"]), float(data.get("gutter", 0.0)),
        )


def panel_key(index: int) -> str:
    return "title" if index == TITLE_INDEX else str(index)


def panel_padding(bbox: Box) -> float:
    return PAD_FRACTION * min(bbox.w, bbox.h)


def _band_height(items: Sequence[BulletItem], width: float) -> float:
    return sum(item_lines(it, width) * LINE_HEIGHT * scaled_size(it.font_size, 1.0) for it in items)


def layout_panel(
    panel: Panel,
    block: BulletBlock,
    asset: Optional[AssetRef] = None,
    font_scale: float = 1.0,
) -> PanelFragment:
    """Title band on top, asset at the bottom scaled to the panel width, textboxes in between.

    The asset keeps its aspect ratio; its height is capped at half of the
    space below the title band, and it is centred when the cap binds.
    """
    b = panel.bbox
    pad = panel_padding(b)
    key = panel_key(panel.section_index)
    inner_w = b.w - 2 * pad
    band_max = TITLE_PANEL_BAND_MAX if panel.section_index == TITLE_INDEX else TITLE_BAND_MAX
    title_h = min(band_max * b.h, _band_height(block.title, inner_w) + pad)
    shapes = [ShapeSpec(f"P{key}/title", "title", Box(b.x + pad, b.y + pad, inner_w, title_h - pad), tuple(block.title))]

    top = b.y + title_h + pad
    bottom = b.y + b.h - pad
    if asset is not None:
        if asset.width_px <= 0 or asset.height_px <= 0:
            raise RenderError("asset has no size", panel.section_index)
        img_w = inner_w
        img_h = img_w / asset.aspect
        cap = ASSET_MAX_SHARE * (bottom - top)
        if img_h > cap:
            img_h = cap
            img_w = img_h * asset.aspect
        img_box = Box(b.x + (b.w - img_w) / 2, bottom - img_h, img_w, img_h)
        shapes.append(ShapeSpec(f"P{key}/picture", "picture", img_box, image=asset.path))
        bottom = img_box.y - pad

    region = Box(b.x + pad, top, inner_w, max(bottom - top, 1e-6))
    gutter = pad if len(block.textboxes) == 2 else 0.0
    if len(block.textboxes) == 2:
        col_w = (b.w - 3 * pad) / 2
        cols = [Box(b.x + pad, top, col_w, region.h), Box(b.x + 2 * pad + col_w, top, col_w, region.h)]
    else:
        cols = [region]
    for k, (items, col) in enumerate(zip(block.textboxes, cols), start=1):
        if items:
            shapes.append(ShapeSpec(f"P{key}/textbox{k}", "textbox", col, tuple(items), font_scale))
    # picture last in the tuple keeps text shapes in reading order
    shapes.sort(key=lambda s: s.role == "picture")
    return PanelFragment(panel.section_index, b, tuple(shapes), region, gutter)


# -- OOXML document -------------------------------------------------------


def _emu(px: float) -> int:
    return int(round(px * EMU_PER_PX))


def _emu_box(box: Box) -> tuple[int, int, int, int]:
    left, top = _emu(box.x), _emu(box.y)
    return left, top, _emu(box.x + box.w) - left, _emu(box.y + box.h) - top


def _fill_paragraph(paragraph, item: BulletItem, font_scale: float) -> None:
    paragraph.alignment = _ALIGN[item.alignment]
    paragraph.level = item.level
    size = scaled_size(item.font_size, font_scale)
    pPr = paragraph._p.get_or_add_pPr()
    if item.bullet:
        indent = _emu(size * (item.level + 1))
        pPr.set("marL", str(indent))
        pPr.set("indent", str(-_emu(size)))
        bu = OxmlElement("a:buChar")
        bu.set("char", "•")
        pPr.append(bu)
    else:
        pPr.set("marL", str(_emu(size * item.level)))
        pPr.set("indent", "0")
        pPr.append(OxmlElement("a:buNone"))
    for run_spec in item.runs:
        run = paragraph.add_run()
        run.text = run_spec.text
        run.font.size = Pt(size)
        if run_spec.bold is not None:
            run.font.bold = run_spec.bold
        if run_spec.italic is not None:
            run.font.italic = run_spec.italic


class PosterDocument:
    """A one-slide presentation sized to the poster geometry."""

    def __init__(self, geometry: PosterGeometry):
        self.geometry = geometry
        self.prs = Presentation()
        self.prs.slide_width = Emu(_emu(geometry.width_px))
        self.prs.slide_height = Emu(_emu(geometry.height_px))
        self.slide = self.prs.slides.add_slide(self.prs.slide_layouts[6])

    def add_shape(self, spec: ShapeSpec) -> None:
        left, top, width, height = _emu_box(spec.box)
        if spec.role == "picture":
            if not spec.image or not Path(spec.image).is_file():
                raise RenderError(f"asset file missing: {spec.image}")
            pic = self.slide.shapes.add_picture(spec.image, left, top, width, height)
            pic.name = spec.name
            return
        shape = self.slide.shapes.add_textbox(left, top, width, height)
        shape.name = spec.name
        tf = shape.text_frame
        tf.word_wrap = True
        tf.auto_size = MSO_AUTO_SIZE.NONE
        tf.vertical_anchor = MSO_ANCHOR.TOP
        tf.margin_left = tf.margin_right = tf.margin_top = tf.margin_bottom = 0
        scale = spec.font_scale if spec.role == "textbox" else 1.0
        for i, item in enumerate(spec.items):
            paragraph = tf.paragraphs[0] if i == 0 else tf.add_paragraph()
            _fill_paragraph(paragraph, item, scale)

    def add_fragment(self, fragment: PanelFragment) -> None:
        try:
            for spec in fragment.shapes:
                self.add_shape(spec)
        except RenderError as exc:
            raise RenderError(str(exc), fragment.panel_index) from exc

    def save(self, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.prs.save(str(path))
        return path


def assemble_poster(fragments: Sequence[PanelFragment], geometry: PosterGeometry, path: Path) -> Path:
    """Single-threaded assembly of panel fragments, title panel first then body panels by index."""
    doc = PosterDocument(geometry)
    for fragment in sorted(fragments, key=lambda f: f.panel_index):
        doc.add_fragment(fragment)
    return doc.save(path)


def shape_boxes(pptx_path: Path) -> list[tuple[str, Box]]:
    """Names and pixel boxes of every shape in the saved poster."""
    prs = Presentation(str(pptx_path))
    out = []
    for shape in prs.slides[0].shapes:
        out.append(
            (
                shape.name,
                Box(shape.left / EMU_PER_PX, shape.top / EMU_PER_PX, shape.width / EMU_PER_PX, shape.height / EMU_PER_PX),
            )
        )
    return out


def panel_of(shape_name: str) -> Optional[str]:
    if not shape_name.startswith("P") or "/" not in shape_name:
        return None
    return shape_name[1:].split("/", 1)[0]
