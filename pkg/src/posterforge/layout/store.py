"""``layout.json``: the contract between planning and painting."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional

from ..errors import ContractError
from .matching import AssetMatch
from .tree import Box, Layout, Panel, PosterGeometry, TITLE_INDEX, leaf_indices, place, tree_from_dict, tree_to_dict
from .weights import ContentWeight


@dataclass(frozen=True)
class LayoutPlan:
    layout: Layout
    matches: AssetMatch
    weights: tuple[ContentWeight, ...] = ()


def _panel_dict(p: Panel) -> dict:
    return {"section_index": p.section_index, "bbox": p.bbox.as_list()}


def save_layout(plan: LayoutPlan, path: Path) -> None:
    layout = plan.layout
    data = {
        "geometry": asdict(layout.geometry),
        "tree": tree_to_dict(layout.tree),
        "title_panel": _panel_dict(layout.title_panel),
        "panels": [_panel_dict(p) for p in layout.panels],
        "matches": plan.matches.to_dict(),
        "weights": [asdict(w) for w in plan.weights],
    }
    Path(path).write_text(json.dumps(data, indent=2))


def check_layout(layout: Layout, rel_tol: float = 1e-6) -> None:
    """Raise ContractError unless panels tile the body, sit inside the canvas and match the tree."""
    geometry = layout.geometry
    canvas = Box(0.0, 0.0, float(geometry.width_px), float(geometry.height_px))
    leaves = sorted(leaf_indices(layout.tree))
    if leaves != list(range(len(leaves))):
        raise ContractError(f"tree leaves {leaves} are not 0..n-1")
    if [p.section_index for p in layout.panels] != leaves:
        raise ContractError("panel list does not match tree leaves")
    body = geometry.body_box
    total = sum(p.bbox.area for p in layout.panels)
    if abs(total - body.area) > rel_tol * body.area:
        raise ContractError(f"panel areas sum to {total}, body area is {body.area}")
    expected = {p.section_index: p.bbox for p in place(layout.tree, body)}
    for p in layout.all_panels:
        if p.bbox.w <= 0 or p.bbox.h <= 0 or not canvas.contains(p.bbox):
            raise ContractError(f"panel {p.section_index} has an invalid bbox {p.bbox}")
        if not p.is_title:
            e = expected[p.section_index]
            if any(abs(u - v) > 1e-6 * max(canvas.w, canvas.h) for u, v in zip(e.as_list(), p.bbox.as_list())):
                raise ContractError(f"panel {p.section_index} bbox disagrees with the tree")


def load_layout(path: Path, expected_sections: Optional[int] = None) -> LayoutPlan:
    data = json.loads(Path(path).read_text())
    try:
        geometry = PosterGeometry(**data["geometry"])
        tree = tree_from_dict(data["tree"])
        title = data["title_panel"]
        title_panel = Panel(TITLE_INDEX, Box(*title["bbox"]))
        panels = tuple(Panel(int(p["section_index"]), Box(*p["bbox"])) for p in data["panels"])
        matches = AssetMatch.from_dict(data.get("matches", {}))
        weights = tuple(ContentWeight(**w) for w in data.get("weights", []))
    except (KeyError, TypeError, ValueError) as exc:
        raise ContractError(f"malformed layout file {path}: {exc}") from exc
    layout = Layout(geometry, tree, title_panel, panels)
    check_layout(layout)
    if expected_sections is not None and len(panels) != expected_sections:
        raise ContractError(f"layout has {len(panels)} panels, library has {expected_sections} body sections")
    return LayoutPlan(layout, matches, weights)
