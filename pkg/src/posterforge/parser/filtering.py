from __future__ import annotations

import json
import logging
from typing import Iterable, Union

from .. import prompts
from ..gateway import Gateway, ModelRequest
from .library import MAX_ASSETS_PER_KIND, AssetLibrary, FigureAsset

log = logging.getLogger(__name__)


def asset_information(assets: Iterable[FigureAsset]) -> dict[str, dict]:
    return {
        str(a.id): {"caption": a.caption, "path": a.file, "width": a.width_px, "height": a.height_px}
        for a in assets
    }


def _kept_ids(value: Union[dict, list]) -> list[int]:
    """Ids the model kept, in its order; accepts an id-keyed dict or a list of objects/ids."""
    raw: list = []
    if isinstance(value, dict):
        raw = list(value.keys())
    else:
        for entry in value:
            raw.append(entry.get("id") if isinstance(entry, dict) else entry)
    ids = []
    for item in raw:
        try:
            ids.append(int(str(item).strip()))
        except (TypeError, ValueError):
            log.warning("ignoring unparseable asset id %r", item)
    return ids


def _select(candidates: tuple[FigureAsset, ...], kept: list[int], kind: str) -> list[FigureAsset]:
    known = {a.id for a in candidates}
    unknown = [i for i in kept if i not in known]
    if unknown:
        log.warning("filter returned unknown %s ids %s; dropped", kind, unknown)
    keep = set(kept) & known
    selected = [a for a in candidates if a.id in keep]
    if len(selected) > MAX_ASSETS_PER_KIND:
        log.warning("filter kept %d %ss; capping at %d", len(selected), kind, MAX_ASSETS_PER_KIND)
    return selected[:MAX_ASSETS_PER_KIND]


def filter_assets(library: AssetLibrary, gateway: Gateway) -> AssetLibrary:
    """Keep the figures and tables the model deems relevant, at most five of each.

    With no candidates the library is returned unchanged and no call is made.
    """
    if not library.figures and not library.tables:
        return library
    payload = {
        "json_content": library.to_dict()["sections"],
        "image_information": asset_information(library.figures),
        "table_information": asset_information(library.tables),
    }
    request = ModelRequest(
        role_tag="parser.filter",
        system_prompt=prompts.render("parser_filter.system"),
        user_prompt=prompts.render("parser_filter.user", payload=json.dumps(payload, indent=2)),
        expect_json=True,
    )
    result = gateway.complete_json(request, "filter")
    figures = _select(library.figures, _kept_ids(result.image_information), "image")
    tables = _select(library.tables, _kept_ids(result.table_information), "table")
    return library.with_assets(figures, tables)
