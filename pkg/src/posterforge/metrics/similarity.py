from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import MetricError
from .embedding import Embedder, ImageLike

log = logging.getLogger(__name__)


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise MetricError("cosine of a zero vector is undefined")
    return float(np.clip(np.dot(a, b) / (na * nb), -1.0, 1.0))


def visual_similarity(gen: ImageLike, gt: ImageLike, embedder: Embedder) -> float:
    """Cosine between the image embeddings of a generated and a reference poster."""
    try:
        return cosine(embedder.embed_image(gen), embedder.embed_image(gt))
    except MetricError:
        raise
    except Exception as exc:
        raise MetricError(f"image embedding failed: {exc}") from exc


@dataclass(frozen=True)
class FigureTextPair:
    figure: str
    section_text: str

    def __post_init__(self) -> None:
        if not self.figure or not self.section_text.strip():
            raise ValueError("figure and section text must both be non-empty")


def figure_relevance(pairs: Sequence[FigureTextPair], embedder: Embedder) -> float:
    """Mean figure-to-section-text cosine; 0 for a poster with no (readable) figures."""
    scores = []
    for pair in pairs:
        try:
            image_vec = embedder.embed_image(pair.figure)
        except MetricError as exc:
            log.warning("skipping figure %s: %s", pair.figure, exc)
            continue
        scores.append(cosine(image_vec, embedder.embed_text(pair.section_text)))
    if not scores:
        return 0.0
    return float(np.mean(scores))
