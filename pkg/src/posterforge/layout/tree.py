"""Binary split-tree layout of the poster body.

A ``vertical`` split draws a vertical cut, putting its children side by side
(left child first); a ``horizontal`` split stacks them (left child on top).
Vertical splits never appear below horizontal ones, so the tree is a set of
columns each holding a stack of rows, and column-major traversal of the
leaves always reproduces section order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence, Union

from ..errors import ContractError, LayoutError
from .weights import ContentWeight

Axis = Literal["horizontal", "vertical"]

TITLE_INDEX = -1
DEFAULT_TITLE_FRACTION = 0.12
ASPECT_MIN = 0.4
ASPECT_MAX = 2.5


@dataclass(frozen=True)
class PosterGeometry:
    width_px: int = 3456
    height_px: int = 2592
    title_strip_fraction: float = DEFAULT_TITLE_FRACTION

    def __post_init__(self) -> None:
        if self.width_px <= 0 or self.height_px <= 0:
            raise ContractError("poster width and height must be positive")
        if not 0 < self.title_strip_fraction < 0.3:
            raise ContractError("title_strip_fraction must lie in (0, 0.3)")

    @property
    def title_box(self) -> Box:
        return Box(0.0, 0.0, float(self.width_px), self.height_px * self.title_strip_fraction)

    @property
    def body_box(self) -> Box:
        top = self.height_px * self.title_strip_fraction
        return Box(0.0, top, float(self.width_px), self.height_px - top)


@dataclass(frozen=True)
class Box:
    x: float
    y: float
    w: float
    h: float

    @property
    def area(self) -> float:
        return self.w * self.h

    @property
    def aspect(self) -> float:
        return self.w / self.h

    @property
    def center(self) -> tuple[float, float]:
        return (self.x + self.w / 2, self.y + self.h / 2)

    def contains(self, other: Box, tol: float = 1e-6) -> bool:
        return (
            other.x >= self.x - tol
            and other.y >= self.y - tol
            and other.x + other.w <= self.x + self.w + tol
            and other.y + other.h <= self.y + self.h + tol
        )

    def split(self, axis: Axis, ratio: float) -> tuple[Box, Box]:
        if axis == "vertical":
            lw = self.w * ratio
            return Box(self.x, self.y, lw, self.h), Box(self.x + lw, self.y, self.w - lw, self.h)
        th = self.h * ratio
        return Box(self.x, self.y, self.w, th), Box(self.x, self.y + th, self.w, self.h - th)

    def as_list(self) -> list[float]:
        return [self.x, self.y, self.w, self.h]


@dataclass(frozen=True)
class Leaf:
    section_index: int


@dataclass(frozen=True)
class Split:
    axis: Axis
    ratio: float
    left: LayoutNode
    right: LayoutNode

    def __post_init__(self) -> None:
        if not 0 < self.ratio < 1:
            raise ContractError(f"split ratio {self.ratio} outside (0, 1)")


LayoutNode = Union[Leaf, Split]


@dataclass(frozen=True)
class Panel:
    section_index: int
    bbox: Box

    @property
    def is_title(self) -> bool:
        return self.section_index == TITLE_INDEX


@dataclass(frozen=True)
class Layout:
    geometry: PosterGeometry
    tree: LayoutNode
    title_panel: Panel
    panels: tuple[Panel, ...]  # body panels, by section index

    @property
    def all_panels(self) -> tuple[Panel, ...]:
        return (self.title_panel, *self.panels)


def aspect_violation(box: Box, a_min: float = ASPECT_MIN, a_max: float = ASPECT_MAX) -> float:
    """Log-distance of the box aspect from the band ``[a_min, a_max]``; 0 inside it."""
    a = box.aspect
    if a < a_min:
        return math.log(a_min / a)
    if a > a_max:
        return math.log(a / a_max)
    return 0.0


def split_index(weights: Sequence[float]) -> int:
    """Index k (1..n-1) whose prefix sum is closest to half the total; earliest wins ties."""
    total = sum(weights)
    best_k, best_gap, prefix = 1, math.inf, 0.0
    for k in range(1, len(weights)):
        prefix += weights[k - 1]
        gap = abs(prefix - 0.5 * total)
        if gap < best_gap:
            best_k, best_gap = k, gap
    return best_k


def _place(node: LayoutNode, box: Box, out: list[Panel]) -> None:
    if isinstance(node, Leaf):
        out.append(Panel(node.section_index, box))
        return
    a, b = box.split(node.axis, node.ratio)
    _place(node.left, a, out)
    _place(node.right, b, out)


def place(tree: LayoutNode, box: Box) -> list[Panel]:
    out: list[Panel] = []
    _place(tree, box, out)
    return out


def _stack(ws: Sequence[float], offset: int, axis: Axis) -> LayoutNode:
    """Balanced binary tree cutting ``ws`` along one axis; geometry depends only on the weights."""
    if len(ws) == 1:
        return Leaf(offset)
    k = split_index(ws)
    ratio = sum(ws[:k]) / sum(ws)
    return Split(axis, ratio, _stack(ws[:k], offset, axis), _stack(ws[k:], offset + k, axis))


def _column_cost(ws: Sequence[float], width: float, height: float, band) -> tuple[float, float]:
    """(aspect-band violation, squareness) summed over the rows of one column."""
    total = sum(ws)
    violation = squareness = 0.0
    for w in ws:
        row = Box(0.0, 0.0, width, height * w / total)
        violation += aspect_violation(row, *band)
        squareness += abs(math.log(row.aspect))
    return violation, squareness


def _best_columns(ws: Sequence[float], body: Box, band) -> list[int]:
    """Column boundaries minimising total band violation, then total log-aspect.

    Each column spans the body height with width proportional to its weight,
    so the cost of a column is independent of the others and a prefix
    dynamic program finds the optimum over all contiguous partitions.
    """
    n, total = len(ws), sum(ws)
    best: list[tuple[tuple[float, float], int]] = [((0.0, 0.0), 0)] + [((math.inf, math.inf), 0)] * n
    for j in range(1, n + 1):
        for i in range(j):
            col = ws[i:j]
            v, s = _column_cost(col, body.w * sum(col) / total, body.h, band)
            prev = best[i][0]
            cost = (prev[0] + v, prev[1] + s)
            if cost < best[j][0]:
                best[j] = (cost, i)
    bounds, j = [n], n
    while j > 0:
        j = best[j][1]
        bounds.append(j)
    return bounds[::-1]


def _weight_values(weights: Sequence[Union[float, ContentWeight]]) -> list[float]:
    values = [w.weight if isinstance(w, ContentWeight) else float(w) for w in weights]
    for v in values:
        if not math.isfinite(v) or v <= 0:
            raise LayoutError(f"weights must be positive and finite, got {v}")
    return values


def _join(nodes: Sequence[LayoutNode], ws: Sequence[float]) -> LayoutNode:
    if len(nodes) == 1:
        return nodes[0]
    k = split_index(ws)
    return Split("vertical", sum(ws[:k]) / sum(ws), _join(nodes[:k], ws[:k]), _join(nodes[k:], ws[k:]))


def build_layout(
    weights: Sequence[Union[float, ContentWeight]],
    geometry: PosterGeometry,
    a_min: float = ASPECT_MIN,
    a_max: float = ASPECT_MAX,
) -> Layout:
    """Title strip on top, body split into columns of stacked rows with areas proportional to weights.

    Cut ratios are exact weight fractions, so proportionality always holds.
    The column partition is the one whose panels violate the aspect band
    ``[a_min, a_max]`` least, ties going to the squarer panels; within that
    partition every cut falls where the two sides are closest in weight.
    """
    values = _weight_values(weights)
    if not values:
        raise LayoutError("layout needs at least one body section")
    body = geometry.body_box
    bounds = _best_columns(values, body, (a_min, a_max))
    columns = [_stack(values[a:b], a, "horizontal") for a, b in zip(bounds, bounds[1:])]
    col_weights = [sum(values[a:b]) for a, b in zip(bounds, bounds[1:])]
    tree = _join(columns, col_weights)
    panels = tuple(sorted(place(tree, body), key=lambda p: p.section_index))
    return Layout(geometry, tree, Panel(TITLE_INDEX, geometry.title_box), panels)


def reading_order(panels: Sequence[Panel]) -> list[int]:
    """Section indices sorted column-major by panel centre (left to right, then top to bottom)."""
    body = [p for p in panels if not p.is_title]
    return [p.section_index for p in sorted(body, key=lambda p: p.bbox.center)]


def tree_to_dict(node: LayoutNode) -> dict:
    if isinstance(node, Leaf):
        return {"leaf": node.section_index}
    return {
        "axis": node.axis,
        "ratio": node.ratio,
        "left": tree_to_dict(node.left),
        "right": tree_to_dict(node.right),
    }


def tree_from_dict(data: dict) -> LayoutNode:
    if "leaf" in data:
        return Leaf(int(data["leaf"]))
    if data.get("axis") not in ("horizontal", "vertical"):
        raise ContractError(f"bad split axis {data.get('axis')!r}")
    return Split(data["axis"], float(data["ratio"]), tree_from_dict(data["left"]), tree_from_dict(data["right"]))


def leaf_indices(node: LayoutNode) -> list[int]:
    if isinstance(node, Leaf):
        return [node.section_index]
    return leaf_indices(node.left) + leaf_indices(node.right)
