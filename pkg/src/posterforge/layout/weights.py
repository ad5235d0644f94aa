from __future__ import annotations

from dataclasses import dataclass

from ..parser.library import AssetLibrary
from .matching import AssetMatch

DEFAULT_LAMBDA = 50.0
WEIGHT_FLOOR = 1.0


@dataclass(frozen=True)
class ContentWeight:
    section_index: int
    words: int
    figure_area_demand: float
    weight: float


def estimate_weights(
    library: AssetLibrary,
    matches: AssetMatch,
    lam: float = DEFAULT_LAMBDA,
    floor: float = WEIGHT_FLOOR,
) -> list[ContentWeight]:
    """Weight each body section by words plus ``lam`` per mean-sized matched asset.

    Asset demand is the asset's pixel area over the mean area of all matched
    assets, so an average figure costs ``lam`` word-equivalents.
    """
    matched = {i: matches.resolve(library, i) for i in matches}
    areas = [a.area for a in matched.values() if a is not None]
    mean_area = sum(areas) / len(areas) if areas else 0.0
    out = []
    for i, section in enumerate(library.body_sections):
        words = section.word_count
        asset = matched.get(i)
        demand = asset.area / mean_area if asset is not None and mean_area > 0 else 0.0
        out.append(ContentWeight(i, words, demand, max(floor, words + lam * demand)))
    return out
