from __future__ import annotations

import json
import logging
import shlex
import subprocess
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

from PIL import Image

from ..errors import ConversionError, EmptyDocumentError
from .library import FigureAsset, PaperDocument

log = logging.getLogger(__name__)

DEFAULT_CONVERTER = (sys.executable, "-m", "posterforge.parser.builtin_converter", "{pdf}", "{out}")
CommandTemplate = Union[str, Sequence[str]]


@dataclass(frozen=True)
class ConversionResult:
    document: PaperDocument
    figures: tuple[FigureAsset, ...]
    tables: tuple[FigureAsset, ...]
    out_dir: Path


def _expand(template: CommandTemplate, **values: str) -> list[str]:
    parts = shlex.split(template) if isinstance(template, str) else list(template)
    return [p.format(**values) for p in parts]


def _page_count(pdf: Path) -> int:
    import pymupdf

    try:
        with pymupdf.open(pdf) as doc:
            return doc.page_count
    except Exception as exc:
        raise ConversionError(f"cannot open {pdf} as PDF: {exc}") from exc


def _read_candidates(out_dir: Path, sidecar: Optional[Path]) -> tuple[list[FigureAsset], list[FigureAsset]]:
    if sidecar is None or not sidecar.is_file():
        return [], []
    entries = json.loads(sidecar.read_text())
    pools: dict[str, list[FigureAsset]] = {"image": [], "table": []}
    for entry in entries:
        kind = entry.get("kind", "image")
        if kind not in pools:
            log.warning("skipping sidecar entry with unknown kind %r", kind)
            continue
        path = Path(entry["file"])
        if not path.is_absolute():
            path = sidecar.parent / path
        if not path.is_file():
            log.warning("sidecar references missing file %s", path)
            continue
        with Image.open(path) as im:
            width, height = im.size
        k = len(pools[kind]) + 1
        caption = (entry.get("caption") or "").strip()
        if not caption:
            caption = f"{'Figure' if kind == 'image' else 'Table'} {k}"
        pools[kind].append(FigureAsset(k, kind, caption, str(path.resolve()), width, height))
    return pools["image"], pools["table"]


def _find_markdown(out_dir: Path) -> Path:
    for name in ("paper.md", "document.md"):
        if (out_dir / name).is_file():
            return out_dir / name
    found = sorted(out_dir.glob("*.md"))
    if not found:
        raise ConversionError(f"converter produced no markdown file in {out_dir}")
    return found[0]


def convert_pdf(
    pdf: Path,
    out_dir: Path,
    command: Optional[CommandTemplate] = None,
    timeout: float = 600,
) -> ConversionResult:
    """Run the converter command on ``pdf`` and collect markdown plus caption candidates."""
    pdf = Path(pdf)
    out_dir = Path(out_dir)
    if not pdf.is_file():
        raise ConversionError(f"input file not found: {pdf}")
    pages = _page_count(pdf)
    out_dir.mkdir(parents=True, exist_ok=True)
    argv = _expand(command or DEFAULT_CONVERTER, pdf=str(pdf.resolve()), out=str(out_dir.resolve()))
    try:
        proc = subprocess.run(argv, capture_output=True, text=True, timeout=timeout)
    except (OSError, subprocess.TimeoutExpired) as exc:
        raise ConversionError(f"converter could not run: {exc}") from exc
    if proc.returncode != 0:
        raise ConversionError(f"converter exited with status {proc.returncode}", proc.stderr)
    md_path = _find_markdown(out_dir)
    markdown = md_path.read_text(encoding="utf-8")
    if not markdown.strip():
        raise EmptyDocumentError(f"no extractable text in {pdf}")
    figures, tables = _read_candidates(out_dir, out_dir / "captions.json")
    document = PaperDocument(markdown, pages, str(pdf))
    return ConversionResult(document, tuple(figures), tuple(tables), out_dir)


def ingest_markdown(md_path: Path, sidecar: Optional[Path] = None) -> ConversionResult:
    """Bypass conversion: read a markdown file and an optional caption sidecar."""
    md_path = Path(md_path)
    markdown = md_path.read_text(encoding="utf-8")
    if not markdown.strip():
        raise EmptyDocumentError(f"{md_path} is empty")
    if sidecar is None and (md_path.parent / "captions.json").is_file():
        sidecar = md_path.parent / "captions.json"
    figures, tables = _read_candidates(md_path.parent, sidecar)
    pages = max(1, markdown.count("\f") + 1)
    return ConversionResult(PaperDocument(markdown, pages, str(md_path)), tuple(figures), tuple(tables), md_path.parent)


def save_conversion(result: ConversionResult, path: Path) -> None:
    data = {
        "document": {
            "markdown_file": "paper.md",
            "page_count": result.document.page_count,
            "source_path": result.document.source_path,
        },
        "figures": [vars(f) for f in result.figures],
        "tables": [vars(t) for t in result.tables],
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    (path.parent / "paper.md").write_text(result.document.markdown, encoding="utf-8")
    path.write_text(json.dumps(data, indent=2))


def load_conversion(path: Path) -> ConversionResult:
    path = Path(path)
    data = json.loads(path.read_text())
    doc = data["document"]
    markdown = (path.parent / doc["markdown_file"]).read_text(encoding="utf-8")
    figures = tuple(FigureAsset(**f) for f in data["figures"])
    tables = tuple(FigureAsset(**t) for t in data["tables"])
    for asset in (*figures, *tables):
        if not Path(asset.file).is_file():
            raise FileNotFoundError(asset.file)
    return ConversionResult(
        PaperDocument(markdown, doc["page_count"], doc["source_path"]), figures, tables, path.parent
    )
