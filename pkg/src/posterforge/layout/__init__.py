"""Asset matching, content weights and the binary-tree panel layout."""

from .matching import AssetMatch, MatchedAsset, match_assets, validate_match
from .store import LayoutPlan, check_layout, load_layout, save_layout
from .tree import (
    ASPECT_MAX,
    ASPECT_MIN,
    TITLE_INDEX,
    Box,
    Layout,
    Leaf,
    Panel,
    PosterGeometry,
    Split,
    aspect_violation,
    build_layout,
    reading_order,
    split_index,
)
from .weights import DEFAULT_LAMBDA, WEIGHT_FLOOR, ContentWeight, estimate_weights

__all__ = [
    "ASPECT_MAX",
    "ASPECT_MIN",
    "DEFAULT_LAMBDA",
    "TITLE_INDEX",
    "WEIGHT_FLOOR",
    "AssetMatch",
    "Box",
    "ContentWeight",
    "Layout",
    "LayoutPlan",
    "Leaf",
    "MatchedAsset",
    "Panel",
    "PosterGeometry",
    "Split",
    "aspect_violation",
    "build_layout",
    "check_layout",
    "estimate_weights",
    "load_layout",
    "match_assets",
    "reading_order",
    "save_layout",
    "split_index",
    "validate_match",
]
