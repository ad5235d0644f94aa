"""Minimal PDF -> markdown converter built on PyMuPDF.

Usable as the default converter command::

    python -m posterforge.parser.builtin_converter input.pdf out_dir

It writes ``out_dir/paper.md``, crops of embedded images and detected tables
under ``out_dir/images/``, and a caption sidecar ``out_dir/captions.json``
holding ``[{"file", "caption", "kind"}]``.
"""

from __future__ import annotations

import json
import re
import statistics
import sys
from pathlib import Path

import pymupdf

CAPTION_RE = re.compile(r"^\s*(Figure|Fig\.|Table)\s*(\d+)\s*[.:]?", re.IGNORECASE)
RENDER_DPI = 144


def _caption_kind(text: str) -> str | None:
    m = CAPTION_RE.match(text)
    if not m:
        return None
    return "table" if m.group(1).lower() == "table" else "image"


def _body_font_size(doc: pymupdf.Document) -> float:
    sizes = []
    for page in doc:
        for block in page.get_text("dict")["blocks"]:
            for line in block.get("lines", []):
                for span in line["spans"]:
                    if span["text"].strip():
                        sizes.append(round(span["size"], 1))
    return statistics.median(sizes) if sizes else 10.0


def _nearest_caption(rect: pymupdf.Rect, captions: list[dict], kind: str) -> dict | None:
    best, best_dist = None, float("inf")
    for cap in captions:
        if cap["used"] or cap["kind"] != kind:
            continue
        crect = cap["rect"]
        if crect.y0 >= rect.y1 - 2:
            dist = crect.y0 - rect.y1
        elif crect.y1 <= rect.y0 + 2:
            dist = (rect.y0 - crect.y1) + 1e-3  # prefer captions below on ties
        else:
            dist = 0.0
        if dist < best_dist:
            best, best_dist = cap, dist
    return best


def convert(pdf_path: Path, out_dir: Path) -> None:
    doc = pymupdf.open(pdf_path)
    out_dir.mkdir(parents=True, exist_ok=True)
    image_dir = out_dir / "images"
    image_dir.mkdir(exist_ok=True)
    body_size = _body_font_size(doc)
    md_parts: list[str] = []
    sidecar: list[dict] = []
    counter = {"image": 0, "table": 0}

    for page in doc:
        captions = []
        for block in page.get_text("dict")["blocks"]:
            if block.get("type") != 0:
                continue
            spans = [s for line in block["lines"] for s in line["spans"] if s["text"].strip()]
            if not spans:
                continue
            text = " ".join(
                "".join(s["text"] for s in line["spans"]).strip() for line in block["lines"]
            ).strip()
            max_size = max(s["size"] for s in spans)
            kind = _caption_kind(text)
            if kind:
                captions.append({"rect": pymupdf.Rect(block["bbox"]), "text": text, "kind": kind, "used": False})
            if max_size >= 1.15 * body_size and len(text.split()) <= 15 and not kind:
                md_parts.append(f"## {text}")
            else:
                md_parts.append(text)

        regions: list[tuple[str, pymupdf.Rect]] = []
        seen = set()
        for info in page.get_images(full=True):
            for rect in page.get_image_rects(info[0]):
                key = tuple(round(v, 1) for v in rect)
                if rect.is_empty or key in seen:
                    continue
                seen.add(key)
                regions.append(("image", rect))
        try:
            for table in page.find_tables().tables:
                regions.append(("table", pymupdf.Rect(table.bbox)))
        except Exception:  # table detection is best-effort
            pass

        for kind, rect in regions:
            counter[kind] += 1
            k = counter[kind]
            cap = _nearest_caption(rect, captions, kind)
            if cap is not None:
                cap["used"] = True
                caption = cap["text"]
            else:
                caption = ""
            name = f"{kind}_{k}.png"
            page.get_pixmap(clip=rect, dpi=RENDER_DPI).save(image_dir / name)
            sidecar.append({"file": f"images/{name}", "caption": caption, "kind": kind})

    (out_dir / "paper.md").write_text("\n\n".join(md_parts) + "\n", encoding="utf-8")
    (out_dir / "captions.json").write_text(json.dumps(sidecar, indent=2))


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if len(argv) != 2:
        print("usage: builtin_converter INPUT.pdf OUT_DIR", file=sys.stderr)
        return 2
    try:
        convert(Path(argv[0]), Path(argv[1]))
    except Exception as exc:
        print(f"conversion failed: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
