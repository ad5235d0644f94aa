"""Pixel-free fit estimate used as a stand-in for the vision critic."""

from __future__ import annotations

import math
from enum import IntEnum
from typing import Sequence

from ..gateway.schemas import BulletBlock, BulletItem
from ..layout.tree import Box

GLYPH_WIDTH = 0.52
LINE_HEIGHT = 1.25
BLANK_FRACTION = 0.45
BULLET_PREFIX = "• "


class Verdict(IntEnum):
    OVERFLOW = 1
    TOO_BLANK = 2
    GOOD = 3


def scaled_size(font_size: float, font_scale: float) -> int:
    return max(1, round(font_size * font_scale))


def item_lines(item: BulletItem, column_width: float, font_scale: float = 1.0) -> int:
    """Lines needed by one bullet: characters (with bullet prefix) over characters per line."""
    size = scaled_size(item.font_size, font_scale)
    per_line = max(1, math.floor(column_width / (GLYPH_WIDTH * size)))
    chars = len(item.text) + (len(BULLET_PREFIX) if item.bullet else 0)
    return max(1, math.ceil(chars / per_line))


def column_height(items: Sequence[BulletItem], column_width: float, font_scale: float = 1.0) -> float:
    return sum(
        item_lines(it, column_width, font_scale) * LINE_HEIGHT * scaled_size(it.font_size, font_scale)
        for it in items
    )


def needed_height(block: BulletBlock, region: Box, font_scale: float = 1.0, gutter: float = 0.0) -> float:
    """Height of the tallest textbox column when the textboxes share ``region`` side by side."""
    boxes = block.textboxes
    width = (region.w - gutter * (len(boxes) - 1)) / len(boxes)
    return max(column_height(items, width, font_scale) for items in boxes)


def estimate_fit(block: BulletBlock, region: Box, font_scale: float = 1.0, gutter: float = 0.0) -> Verdict:
    if region.w <= 0 or region.h <= 0:
        raise ValueError("fit region must have positive area")
    need = needed_height(block, region, font_scale, gutter)
    if need > region.h:
        return Verdict.OVERFLOW
    if need < BLANK_FRACTION * region.h:
        return Verdict.TOO_BLANK
    return Verdict.GOOD
