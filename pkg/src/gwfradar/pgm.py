"""Portable graymap I/O through Pillow: 8-bit (mode L) or 16-bit (mode I) images."""

from __future__ import annotations

import numpy as np
from PIL import Image


def write_pgm(path, image: np.ndarray, maxval: int = 65535) -> None:
    img = np.asarray(image)
    if img.ndim != 2:
        raise ValueError("expected a 2-D image")
    if maxval not in (255, 65535):
        raise ValueError("maxval must be 255 or 65535")
    dtype = np.uint8 if maxval == 255 else np.uint16
    Image.fromarray(np.ascontiguousarray(img, dtype=dtype)).save(path, format="PPM")


def read_pgm(path) -> tuple[np.ndarray, int]:
    """Return ``(image, maxval)``; image is an integer array of shape (rows, cols)."""
    with Image.open(path) as im:
        if im.format != "PPM" or im.mode not in ("L", "I", "I;16", "I;16B"):
            raise ValueError(f"{path}: not a grayscale PGM image")
        maxval = 255 if im.mode == "L" else 65535
        return np.asarray(im).astype(np.int64), maxval
