"""Ternary image construction, neighbor-scored refinement and seed extraction.

A ternary image stores 255 for confident skin (T1), 128 for uncertain (T2)
and 0 for confident non-skin (T3). Refinement rescans every non-border pixel
once, reading only the input image: each neighbor contributes +1 if white,
0 if gray, -1 if black; the score is ``K * T + phi`` where T sums the eight
3x3 ring neighbors and phi the sixteen 5x5 ring neighbors. A score above
``th2`` promotes the pixel to white, below ``th1`` demotes it to black;
white pixels and pixels within 2 of any border are copied unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import colorspace, skinmodel

WHITE, GRAY, BLACK = 255, 128, 0

#: Ternary pixel value for each classification outcome.
TERNARY_VALUE = {
    skinmodel.TernaryClass.T1: WHITE,
    skinmodel.TernaryClass.T2: GRAY,
    skinmodel.TernaryClass.T3: BLACK,
}


@dataclass(frozen=True)
class SeedParams:
    k: float = 2.0
    th1: float = -6.0
    th2: float = 6.0

    def __post_init__(self):
        if self.k <= 0:
            raise ValueError("K must be positive")
        if not self.th1 < self.th2:
            raise ValueError("th1 must be below th2")


def make_ternary(img: np.ndarray, model: skinmodel.SkinClusterModel) -> np.ndarray:
    """Classify every pixel of an (h, w, 3) RGB image into {0, 128, 255}."""
    y, cb, cr = colorspace.ycbcr_planes(img)
    in_masks = {}
    for pid, pair in model.planes.items():
        in_masks[pid] = (
            skinmodel.polygon_mask(pair.inner),
            skinmodel.polygon_mask(pair.outer),
        )
    proj = {"YCb": (y, cb), "YCr": (y, cr), "CbCr": (cb, cr)}
    t1 = np.ones(y.shape, dtype=bool)
    t2 = np.ones(y.shape, dtype=bool)
    for pid, (inner, outer) in in_masks.items():
        a, b = proj[pid]
        t1 &= inner[a, b]
        t2 &= outer[a, b]
    return np.where(t1, WHITE, np.where(t2, GRAY, BLACK)).astype(np.uint8)


def _contributions(ternary: np.ndarray) -> np.ndarray:
    t = np.asarray(ternary)
    return np.where(t == WHITE, 1, np.where(t == BLACK, -1, 0)).astype(np.int64)


def _box_sum(arr: np.ndarray, radius: int) -> np.ndarray:
    """Sum over the (2r+1)^2 window, zero-padded at the borders."""
    p = np.pad(arr, radius)
    out = np.zeros(arr.shape, dtype=arr.dtype)
    h, w = arr.shape
    for dr in range(-radius, radius + 1):
        for dc in range(-radius, radius + 1):
            out += p[radius + dr:radius + dr + h, radius + dc:radius + dc + w]
    return out


def neighbor_score(ternary: np.ndarray, x: int, y: int, k: float) -> float:
    """Score of pixel (x, y): K times the 3x3 ring sum plus the 5x5 ring sum.

    (x, y) must be at least 2 pixels away from every border.
    """
    h, w = ternary.shape
    if not (2 <= x < w - 2 and 2 <= y < h - 2):
        raise ValueError(f"pixel ({x}, {y}) is within 2 of a border of {w}x{h}")
    c = _contributions(ternary)
    ring3 = int(c[y - 1:y + 2, x - 1:x + 2].sum()) - int(c[y, x])
    ring5 = int(c[y - 2:y + 3, x - 2:x + 3].sum()) - int(c[y - 1:y + 2, x - 1:x + 2].sum())
    return k * ring3 + ring5


def refine_ternary(ternary: np.ndarray, params: SeedParams) -> np.ndarray:
    """One no-feedback pass promoting/demoting gray and black pixels.

    Reads only the input image, so the result is independent of traversal
    order and never loses a white pixel.
    """
    t = np.asarray(ternary)
    out = t.copy()
    if t.shape[0] < 5 or t.shape[1] < 5:
        return out  # everything is border
    c = _contributions(t)
    s3 = _box_sum(c, 1)
    s5 = _box_sum(c, 2)
    zeta = params.k * (s3 - c) + (s5 - s3)
    eligible = np.zeros(t.shape, dtype=bool)
    eligible[2:-2, 2:-2] = True
    eligible &= t != WHITE
    out[eligible & (zeta > params.th2)] = WHITE
    out[eligible & (zeta < params.th1)] = BLACK
    return out


def extract_seed(ternary: np.ndarray) -> np.ndarray:
    """Boolean skin seed: true exactly where the ternary image is white."""
    return np.asarray(ternary) == WHITE
