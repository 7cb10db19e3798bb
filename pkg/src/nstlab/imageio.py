"""Image file I/O and resizing.  PNG/JPEG in, PNG out (lossless outputs
keep SSIM comparisons meaningful)."""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image as PILImage, UnidentifiedImageError

from .errors import InputError
from .tensor import Image


def read_image(path: str | Path) -> Image:
    try:
        with PILImage.open(path) as im:
            rgb = im.convert("RGB")
            data = np.asarray(rgb, dtype=np.float32) / 255.0
    except FileNotFoundError:
        raise InputError(f"image not found: {path}") from None
    except (UnidentifiedImageError, OSError) as e:
        raise InputError(f"cannot read image {path}: {e}") from None
    return Image(data)


def write_png(path: str | Path, img: Image) -> None:
    data = np.clip(np.rint(img.data * 255.0), 0, 255).astype(np.uint8)
    PILImage.fromarray(data, mode="RGB").save(path, format="PNG")


def resize_image(img: Image, width: int, height: int) -> Image:
    """Bilinear resize to width x height (no-op when sizes already match)."""
    if (img.width, img.height) == (width, height):
        return img
    data = np.clip(np.rint(img.data * 255.0), 0, 255).astype(np.uint8)
    pil = PILImage.fromarray(data, mode="RGB").resize(
        (width, height), resample=PILImage.BILINEAR
    )
    return Image(np.asarray(pil, dtype=np.float32) / 255.0)
