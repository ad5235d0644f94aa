"""Plain text of a poster, in reading order."""

from __future__ import annotations

import shlex
import subprocess
from pathlib import Path
from typing import Optional, Sequence, Union

from pptx import Presentation

from ..errors import CapabilityError, MetricError
from ..layout.tree import Box

PPTX_SUFFIXES = {".pptx"}


def _groups(items: list[tuple[Box, str]], axis: str) -> list[list[tuple[Box, str]]]:
    """Split items into bands separated by gaps along ``axis`` ("x" or "y")."""

    def span(box: Box) -> tuple[float, float]:
        return (box.x, box.x + box.w) if axis == "x" else (box.y, box.y + box.h)

    ordered = sorted(items, key=lambda it: span(it[0]))
    groups: list[list[tuple[Box, str]]] = []
    end = None
    for it in ordered:
        lo, hi = span(it[0])
        if end is None or lo >= end - 1e-6:
            groups.append([it])
            end = hi
        else:
            groups[-1].append(it)
            end = max(end, hi)
    return groups


def xy_cut(items: list[tuple[Box, str]]) -> list[str]:
    """Recursive XY-cut: split into columns where possible, otherwise peel off the top band.

    Peeling one band at a time keeps columns whose row boundaries happen to
    line up from being read across.
    """
    if len(items) <= 1:
        return [t for _, t in items]
    columns = _groups(items, "x")
    if len(columns) > 1:
        return [t for g in columns for t in xy_cut(g)]
    rows = _groups(items, "y")
    if len(rows) > 1:
        rest = [it for g in rows[1:] for it in g]
        return xy_cut(rows[0]) + xy_cut(rest)
    return [t for _, t in sorted(items, key=lambda it: (it[0].y, it[0].x))]


def _shape_text(shape) -> str:
    if not shape.has_text_frame:
        return ""
    paragraphs = ("".join(run.text for run in p.runs) for p in shape.text_frame.paragraphs)
    return " ".join(" ".join(p.split()) for p in paragraphs if p.strip())


def pptx_text(path: Path) -> str:
    prs = Presentation(str(path))
    blocks = []
    for slide in prs.slides:
        items = []
        for shape in slide.shapes:
            text = _shape_text(shape)
            if text and shape.width and shape.height:
                items.append((Box(shape.left, shape.top, shape.width, shape.height), text))
        blocks.extend(xy_cut(items))
    return " ".join(blocks)


def ocr_text(path: Path, command: Union[str, Sequence[str]], timeout: float = 300) -> str:
    parts = shlex.split(command) if isinstance(command, str) else list(command)
    argv = [p.format(input=str(path)) for p in parts]
    try:
        proc = subprocess.run(argv, capture_output=True, text=True, timeout=timeout)
    except (OSError, subprocess.TimeoutExpired) as exc:
        raise MetricError(f"OCR command could not run: {exc}") from exc
    if proc.returncode != 0:
        raise MetricError(f"OCR command failed ({proc.returncode}): {proc.stderr.strip()}")
    return " ".join(proc.stdout.split())


def extract_poster_text(path: Union[str, Path], ocr_command: Optional[Union[str, Sequence[str]]] = None) -> str:
    """Text of an OOXML poster by shape walk, or of a poster image via the OCR command."""
    path = Path(path)
    if path.suffix.lower() in PPTX_SUFFIXES:
        return pptx_text(path)
    if not ocr_command:
        raise CapabilityError(f"{path.name} is an image and no OCR command is configured")
    return ocr_text(path, ocr_command)


def word_count(text: str) -> int:
    return len(text.split())
