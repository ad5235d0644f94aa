"""Asset library types and their on-disk form (``assets/library.json``)."""

from __future__ import annotations

import json
import shutil
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Literal, Optional

from ..errors import ContractError

AssetKind = Literal["image", "table"]

MAX_ASSETS_PER_KIND = 5


@dataclass(frozen=True)
class PaperDocument:
    markdown: str
    page_count: int
    source_path: str

    def __post_init__(self) -> None:
        if not self.markdown.strip():
            raise ContractError("document markdown is empty")
        if self.page_count < 1:
            raise ContractError("page_count must be >= 1")


@dataclass(frozen=True)
class SectionSynopsis:
    title: str
    content: str

    def __post_init__(self) -> None:
        if not self.title.strip():
            raise ContractError("section title must be non-empty")

    @property
    def word_count(self) -> int:
        return len(self.content.split())


@dataclass(frozen=True)
class FigureAsset:
    id: int
    kind: AssetKind
    caption: str
    file: str
    width_px: int
    height_px: int

    def __post_init__(self) -> None:
        if not self.caption.strip():
            raise ContractError(f"{self.kind} {self.id}: caption must be non-empty")
        if self.width_px <= 0 or self.height_px <= 0:
            raise ContractError(f"{self.kind} {self.id}: size must be positive")

    @property
    def area(self) -> int:
        return self.width_px * self.height_px

    @property
    def aspect(self) -> float:
        return self.width_px / self.height_px


@dataclass(frozen=True)
class PosterMeta:
    poster_title: str
    authors: str = ""
    affiliations: str = ""


@dataclass(frozen=True)
class AssetLibrary:
    """Section synopses (title section first) plus captioned figure and table crops."""

    meta: PosterMeta
    sections: tuple[SectionSynopsis, ...]
    figures: tuple[FigureAsset, ...] = ()
    tables: tuple[FigureAsset, ...] = ()

    @property
    def title_section(self) -> SectionSynopsis:
        return self.sections[0]

    @property
    def body_sections(self) -> tuple[SectionSynopsis, ...]:
        return self.sections[1:]

    def asset(self, kind: AssetKind, asset_id: int) -> Optional[FigureAsset]:
        pool = self.figures if kind == "image" else self.tables
        for a in pool:
            if a.id == asset_id:
                return a
        return None

    def with_assets(self, figures, tables) -> AssetLibrary:
        return replace(self, figures=tuple(figures), tables=tuple(tables))

    def to_dict(self) -> dict:
        return {
            "meta": asdict(self.meta),
            "sections": [asdict(s) for s in self.sections],
            "figures": [asdict(f) for f in self.figures],
            "tables": [asdict(t) for t in self.tables],
        }

    @classmethod
    def from_dict(cls, data: dict) -> AssetLibrary:
        return cls(
            meta=PosterMeta(**data["meta"]),
            sections=tuple(SectionSynopsis(**s) for s in data["sections"]),
            figures=tuple(FigureAsset(**f) for f in data.get("figures", [])),
            tables=tuple(FigureAsset(**t) for t in data.get("tables", [])),
        )


def resolve_file(asset: FigureAsset, base_dir: Path) -> Path:
    path = Path(asset.file)
    return path if path.is_absolute() else base_dir / path


def save_library(library: AssetLibrary, assets_dir: Path) -> AssetLibrary:
    """Copy asset images under ``assets_dir/images`` and write ``library.json``.

    Returns the library with file references rewritten relative to ``assets_dir``.
    """
    assets_dir = Path(assets_dir)
    image_dir = assets_dir / "images"
    image_dir.mkdir(parents=True, exist_ok=True)

    def relocate(asset: FigureAsset) -> FigureAsset:
        src = resolve_file(asset, assets_dir)
        if not src.is_file():
            raise FileNotFoundError(f"{asset.kind} {asset.id}: missing file {src}")
        dest = image_dir / f"{asset.kind}_{asset.id}{src.suffix or '.png'}"
        if src.resolve() != dest.resolve():
            shutil.copyfile(src, dest)
        return replace(asset, file=str(dest.relative_to(assets_dir)))

    relocated = library.with_assets(
        [relocate(f) for f in library.figures], [relocate(t) for t in library.tables]
    )
    (assets_dir / "library.json").write_text(json.dumps(relocated.to_dict(), indent=2))
    return relocated


def load_library(assets_dir: Path) -> AssetLibrary:
    assets_dir = Path(assets_dir)
    data = json.loads((assets_dir / "library.json").read_text())
    library = AssetLibrary.from_dict(data)
    for asset in (*library.figures, *library.tables):
        if not resolve_file(asset, assets_dir).is_file():
            raise FileNotFoundError(f"{asset.kind} {asset.id}: missing file {asset.file}")
    return library
