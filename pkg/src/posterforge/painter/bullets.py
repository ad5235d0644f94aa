from __future__ import annotations

import json

from .. import prompts
from ..gateway import Gateway, ModelRequest
from ..gateway.schemas import BulletBlock, BulletItem, TextRun
from ..layout.tree import Panel
from ..parser.library import PosterMeta, SectionSynopsis

WIDE_PANEL_ASPECT = 1.4


def decide_textbox_count(panel: Panel, has_asset: bool) -> int:
    """Two side-by-side textboxes only for wide panels that carry no asset."""
    if has_asset:
        return 1
    return 2 if panel.bbox.aspect >= WIDE_PANEL_ASPECT else 1


def _count_check(n_textboxes: int):
    def check(block: BulletBlock) -> list[str]:
        have = len(block.textboxes)
        if have != n_textboxes:
            return [f"expected {n_textboxes} textbox(es), got {have}"]
        return []

    return check


def compose_bullets(section: SectionSynopsis, n_textboxes: int, gateway: Gateway) -> BulletBlock:
    if n_textboxes not in (1, 2):
        raise ValueError("n_textboxes must be 1 or 2")
    request = ModelRequest(
        role_tag="painter.compose",
        system_prompt=prompts.render("painter_compose.system"),
        user_prompt=prompts.render(
            "painter_compose.user",
            section_json=json.dumps({"title": section.title, "content": section.content}, indent=2),
            n_textboxes=n_textboxes,
        ),
        expect_json=True,
    )
    return gateway.complete_json(request, "painter", check=_count_check(n_textboxes))


def title_block(meta: PosterMeta, strip_height: float) -> BulletBlock:
    """Deterministic content for the title panel: paper title, then authors and affiliations."""

    def line(text: str, size: float, bold: bool = False) -> BulletItem:
        return BulletItem(
            alignment="center", bullet=False, level=0, font_size=max(1, round(size)),
            runs=[TextRun(text=text, bold=bold or None)],
        )

    body = [line(t, strip_height * f) for t, f in ((meta.authors, 0.12), (meta.affiliations, 0.09)) if t.strip()]
    return BulletBlock(title=[line(meta.poster_title, strip_height * 0.26, bold=True)], textbox1=body)
