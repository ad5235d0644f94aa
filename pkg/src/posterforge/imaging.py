from __future__ import annotations

import io
from pathlib import Path
from typing import Union

from PIL import Image

ImageInput = Union[bytes, str, Path, Image.Image]


def image_bytes(image: ImageInput) -> bytes:
    """PNG-encode an in-memory image; read paths as-is; pass bytes through."""
    if isinstance(image, bytes):
        return image
    if isinstance(image, Image.Image):
        buf = io.BytesIO()
        image.save(buf, format="PNG")
        return buf.getvalue()
    return Path(image).read_bytes()
