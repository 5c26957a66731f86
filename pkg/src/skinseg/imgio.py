"""PNG reading and writing for images, planes and masks (Pillow-backed).

Input rasters are decoded to 8-bit RGB; an alpha channel is discarded.
Masks are written as 8-bit grayscale with 0/255 and read back as >= 128.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image


def load_rgb(path) -> np.ndarray:
    """Decode any common raster file into an (h, w, 3) uint8 array."""
    with Image.open(path) as im:
        return np.asarray(im.convert("RGB"), dtype=np.uint8)


def load_mask(path) -> np.ndarray:
    """Read a mask PNG as booleans (gray value >= 128 counts as true)."""
    with Image.open(path) as im:
        return np.asarray(im.convert("L"), dtype=np.uint8) >= 128


def save_gray(path, plane: np.ndarray) -> None:
    """Write an (h, w) uint8 plane as grayscale PNG."""
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(np.asarray(plane, dtype=np.uint8), mode="L").save(path)


def save_mask(path, mask: np.ndarray) -> None:
    """Write a boolean mask as a 0/255 grayscale PNG."""
    save_gray(path, np.asarray(mask, dtype=bool).astype(np.uint8) * 255)


def save_rgb(path, img: np.ndarray) -> None:
    """Write an (h, w, 3) uint8 array as RGB PNG."""
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(np.asarray(img, dtype=np.uint8), mode="RGB").save(path)


def overlay(img: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Alpha-blend the mask (green) over the input for visual inspection."""
    out = np.asarray(img, dtype=np.float64).copy()
    m = np.asarray(mask, dtype=bool)
    out[m] = 0.5 * out[m] + 0.5 * np.array([0.0, 255.0, 0.0])
    return np.clip(np.floor(out + 0.5), 0, 255).astype(np.uint8)
