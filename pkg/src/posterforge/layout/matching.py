"""Assigning figures and tables to body sections."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Iterator, Literal, Optional

from .. import prompts
from ..gateway import Gateway, ModelRequest
from ..parser.filtering import asset_information
from ..parser.library import AssetLibrary, FigureAsset

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class MatchedAsset:
    kind: Literal["image", "table"]
    asset_id: int
    reason: str = ""


@dataclass(frozen=True)
class AssetMatch:
    """Body-section index (0-based, title section excluded) to at most one asset."""

    entries: dict[int, MatchedAsset] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self.entries))

    def get(self, section_index: int) -> Optional[MatchedAsset]:
        return self.entries.get(section_index)

    def resolve(self, library: AssetLibrary, section_index: int) -> Optional[FigureAsset]:
        m = self.entries.get(section_index)
        return None if m is None else library.asset(m.kind, m.asset_id)

    def to_dict(self) -> dict:
        return {
            str(i): {"kind": m.kind, "id": m.asset_id, "reason": m.reason}
            for i, m in sorted(self.entries.items())
        }

    @classmethod
    def from_dict(cls, data: dict) -> AssetMatch:
        entries = {int(k): MatchedAsset(v["kind"], int(v["id"]), v.get("reason", "")) for k, v in data.items()}
        return validate_match(entries)


def validate_match(entries: dict[int, MatchedAsset], library: Optional[AssetLibrary] = None) -> AssetMatch:
    """Enforce injectivity (first section wins) and, given a library, id existence."""
    seen: set[tuple[str, int]] = set()
    kept: dict[int, MatchedAsset] = {}
    for index in sorted(entries):
        m = entries[index]
        key = (m.kind, m.asset_id)
        if library is not None and library.asset(m.kind, m.asset_id) is None:
            log.warning("section %d: %s %d does not exist; dropped", index, m.kind, m.asset_id)
            continue
        if key in seen:
            log.warning("section %d: %s %d already assigned to an earlier section; dropped", index, *key)
            continue
        seen.add(key)
        kept[index] = m
    return AssetMatch(kept)


def _norm(name: str) -> str:
    return " ".join(name.lower().split())


def _section_lookup(library: AssetLibrary) -> dict[str, int]:
    lookup: dict[str, int] = {}
    for i, section in enumerate(library.body_sections):
        lookup.setdefault(_norm(section.title), i)
    return lookup


def match_assets(library: AssetLibrary, gateway: Gateway) -> AssetMatch:
    """One model call mapping section names to assets, then local repair."""
    if not library.figures and not library.tables:
        return AssetMatch()
    payload = {
        "json_content": [{"title": s.title, "content": s.content} for s in library.body_sections],
        "image_information": asset_information(library.figures),
        "table_information": asset_information(library.tables),
    }
    request = ModelRequest(
        role_tag="planner.match",
        system_prompt=prompts.render("planner_match.system"),
        user_prompt=prompts.render("planner_match.user", payload=json.dumps(payload, indent=2)),
        expect_json=True,
    )
    result = gateway.complete_json(request, "matching")
    lookup = _section_lookup(library)
    title_name = _norm(library.title_section.title)
    raw: dict[int, MatchedAsset] = {}
    for name, entry in result.root.items():
        index = lookup.get(_norm(name))
        if index is None:
            why = "the title section" if _norm(name) == title_name else "an unknown section"
            log.warning("match for %r names %s; dropped", name, why)
            continue
        if entry.image is not None and entry.table is not None:
            log.warning("section %r got both an image and a table; keeping the image", name)
        kind, asset_id = ("image", entry.image) if entry.image is not None else ("table", entry.table)
        raw[index] = MatchedAsset(kind, asset_id, entry.reason)
    return validate_match(raw, library)
