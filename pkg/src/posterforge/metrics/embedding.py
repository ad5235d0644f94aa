"""Image and text embedders behind a common interface."""

from __future__ import annotations

import hashlib
import threading
from pathlib import Path
from typing import Mapping, Optional, Protocol, Union

import numpy as np
from PIL import Image

from ..errors import MetricError

ImageLike = Union[str, Path, Image.Image]

TEXT_TOKEN_LIMIT = 512


class Embedder(Protocol):
    dim: int

    def embed_image(self, image: ImageLike) -> np.ndarray: ...

    def embed_text(self, text: str) -> np.ndarray: ...


def load_image(image: ImageLike) -> Image.Image:
    if isinstance(image, Image.Image):
        return image.convert("RGB")
    try:
        with Image.open(image) as im:
            return im.convert("RGB")
    except (OSError, ValueError) as exc:
        raise MetricError(f"cannot load image {image}: {exc}") from exc


def truncate_tokens(text: str, limit: int = TEXT_TOKEN_LIMIT) -> str:
    return " ".join(text.split()[:limit])


def _check(vec: np.ndarray, dim: int) -> np.ndarray:
    vec = np.asarray(vec, dtype=np.float64).reshape(-1)
    if vec.shape[0] != dim or not np.all(np.isfinite(vec)):
        raise MetricError(f"embedding has wrong dimension or non-finite entries (dim {vec.shape[0]}, expected {dim})")
    return vec


class MockEmbedder:
    """Deterministic offline embedder.

    Images become their 16x16 grayscale thumbnail, texts a signed hashed bag of
    words. ``vectors`` pins exact outputs for chosen image paths or texts.
    """

    def __init__(self, dim: int = 256, vectors: Optional[Mapping[str, np.ndarray]] = None):
        side = int(round(dim**0.5))
        if side * side != dim:
            raise ValueError("mock embedder dimension must be a perfect square")
        self.dim = dim
        self._side = side
        self._vectors = {k: _check(v, dim) for k, v in (vectors or {}).items()}

    def _pinned(self, key: object) -> Optional[np.ndarray]:
        if isinstance(key, (str, Path)):
            return self._vectors.get(str(key))
        return None

    def embed_image(self, image: ImageLike) -> np.ndarray:
        pinned = self._pinned(image)
        if pinned is not None:
            return pinned
        thumb = load_image(image).convert("L").resize((self._side, self._side), Image.Resampling.BILINEAR)
        return np.asarray(thumb, dtype=np.float64).reshape(-1) / 255.0

    def embed_text(self, text: str) -> np.ndarray:
        pinned = self._vectors.get(text)
        if pinned is not None:
            return pinned
        vec = np.zeros(self.dim)
        for token in truncate_tokens(text).lower().split():
            digest = hashlib.sha256(token.encode()).digest()
            index = int.from_bytes(digest[:4], "little") % self.dim
            vec[index] += 1.0 if digest[4] & 1 else -1.0
        return vec


class HFClipEmbedder:
    """Contrastive image-text model loaded lazily through ``transformers``."""

    def __init__(self, model_name: str = "BAAI/AltCLIP", device: str = "cpu"):
        self.model_name = model_name
        self.device = device
        self._lock = threading.Lock()
        self._model = None
        self._processor = None
        self.dim = 0

    def _load(self):
        with self._lock:
            if self._model is None:
                try:
                    from transformers import AutoModel, AutoProcessor
                except ImportError as exc:
                    raise MetricError("transformers is not installed; install the 'hf' extra") from exc
                try:
                    self._processor = AutoProcessor.from_pretrained(self.model_name)
                    self._model = AutoModel.from_pretrained(self.model_name).to(self.device).eval()
                except Exception as exc:
                    raise MetricError(f"cannot load embedding model {self.model_name}: {exc}") from exc
                self.dim = int(self._model.config.projection_dim)
        return self._model, self._processor

    def embed_image(self, image: ImageLike) -> np.ndarray:
        import torch

        model, processor = self._load()
        inputs = processor(images=load_image(image), return_tensors="pt").to(self.device)
        with torch.no_grad():
            out = model.get_image_features(**inputs)
        return _check(out[0].cpu().numpy(), self.dim)

    def embed_text(self, text: str) -> np.ndarray:
        import torch

        model, processor = self._load()
        inputs = processor(
            text=[truncate_tokens(text)], return_tensors="pt", truncation=True, max_length=TEXT_TOKEN_LIMIT, padding=True
        ).to(self.device)
        with torch.no_grad():
            out = model.get_text_features(**inputs)
        return _check(out[0].cpu().numpy(), self.dim)


def make_embedder(kind: str = "mock", **options) -> Embedder:
    if kind == "mock":
        return MockEmbedder(**options)
    if kind in ("hf", "altclip"):
        return HFClipEmbedder(**options)
    raise MetricError(f"unknown embedder kind {kind!r}")
