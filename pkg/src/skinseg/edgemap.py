"""Canny edge detection producing the diffusion barrier map.

Four stages, all deterministic:

1. Gaussian smoothing with a truncated kernel of radius ``ceil(3 * sigma)``,
   separable, mirror padding that repeats the border sample (a constant
   region near the border stays exactly constant).
2. Standard 3x3 Sobel gradients, computed on interior pixels only; border
   pixels get zero gradient and can never be edges.
3. Non-maximum suppression with the gradient direction quantized to four
   sectors (0, 45, 90, 135 degrees). A pixel survives when its magnitude is
   >= the backward neighbor and strictly > the forward neighbor along the
   gradient, so a two-pixel plateau keeps exactly one line (the forward one,
   i.e. larger x / larger y).
4. Double-threshold hysteresis: weak pixels (>= low, < high) survive only in
   8-connected components that contain a strong pixel (>= high).

Magnitude is ``hypot(gx, gy)`` of the unnormalized Sobel responses.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from . import colorspace


@dataclass(frozen=True)
class CannyParams:
    sigma: float = 1.4
    low: float = 40.0
    high: float = 100.0

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if not 0 <= self.low <= self.high:
            raise ValueError("need 0 <= low <= high")


def gaussian_kernel(sigma: float) -> np.ndarray:
    """Normalized 1-D Gaussian, truncated at radius ceil(3 * sigma)."""
    radius = math.ceil(3.0 * sigma)
    xs = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-(xs * xs) / (2.0 * sigma * sigma))
    return k / k.sum()


def _smooth(plane: np.ndarray, sigma: float) -> np.ndarray:
    k = gaussian_kernel(sigma)
    radius = len(k) // 2
    out = plane.astype(np.float64)
    for axis in (0, 1):
        pad = [(0, 0), (0, 0)]
        pad[axis] = (radius, radius)
        p = np.pad(out, pad, mode="symmetric")
        acc = np.zeros_like(out)
        for i, w in enumerate(k):
            if axis == 0:
                acc += w * p[i:i + out.shape[0], :]
            else:
                acc += w * p[:, i:i + out.shape[1]]
        out = acc
    return out


def _sobel(sm: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Interior-only Sobel responses; borders stay zero."""
    gx = np.zeros_like(sm)
    gy = np.zeros_like(sm)
    gx[1:-1, 1:-1] = (
        (sm[:-2, 2:] + 2.0 * sm[1:-1, 2:] + sm[2:, 2:])
        - (sm[:-2, :-2] + 2.0 * sm[1:-1, :-2] + sm[2:, :-2])
    )
    gy[1:-1, 1:-1] = (
        (sm[2:, :-2] + 2.0 * sm[2:, 1:-1] + sm[2:, 2:])
        - (sm[:-2, :-2] + 2.0 * sm[:-2, 1:-1] + sm[:-2, 2:])
    )
    return gx, gy


def _nms(mag: np.ndarray, gx: np.ndarray, gy: np.ndarray) -> np.ndarray:
    """Thin ridges to single-pixel width along the quantized gradient."""
    h, w = mag.shape
    angle = np.mod(np.degrees(np.arctan2(gy, gx)), 180.0)
    sector = np.zeros(mag.shape, dtype=np.uint8)
    sector[(angle >= 22.5) & (angle < 67.5)] = 1
    sector[(angle >= 67.5) & (angle < 112.5)] = 2
    sector[(angle >= 112.5) & (angle < 157.5)] = 3

    def shifted(dr: int, dc: int) -> np.ndarray:
        out = np.zeros_like(mag)
        rs = slice(max(dr, 0), h + min(dr, 0))
        rd = slice(max(-dr, 0), h + min(-dr, 0))
        cs = slice(max(dc, 0), w + min(dc, 0))
        cd = slice(max(-dc, 0), w + min(-dc, 0))
        out[rd, cd] = mag[rs, cs]
        return out

    # (forward, backward) neighbor offsets per sector, y pointing down
    offsets = {0: (0, 1), 1: (1, 1), 2: (1, 0), 3: (1, -1)}
    keep = np.zeros(mag.shape, dtype=bool)
    for s, (dr, dc) in offsets.items():
        fwd = shifted(dr, dc)
        back = shifted(-dr, -dc)
        keep |= (sector == s) & (mag > fwd) & (mag >= back)
    keep &= mag > 0
    keep[0, :] = keep[-1, :] = False
    keep[:, 0] = keep[:, -1] = False
    return keep


def _hysteresis(keep: np.ndarray, mag: np.ndarray, low: float, high: float) -> np.ndarray:
    strong = keep & (mag >= high)
    weak = keep & (mag >= low)
    h, w = mag.shape
    edges = strong.copy()
    queue = deque(zip(*np.nonzero(strong)))
    while queue:
        r, c = queue.popleft()
        for dr in (-1, 0, 1):
            for dc in (-1, 0, 1):
                rr, cc = r + dr, c + dc
                if 0 <= rr < h and 0 <= cc < w and weak[rr, cc] and not edges[rr, cc]:
                    edges[rr, cc] = True
                    queue.append((rr, cc))
    return edges


def canny(gray: np.ndarray, params: CannyParams = CannyParams()) -> np.ndarray:
    """Boolean edge map of an (h, w) uint8 plane (at least 3x3)."""
    gray = np.asarray(gray)
    if gray.ndim != 2 or gray.shape[0] < 3 or gray.shape[1] < 3:
        raise ValueError(f"plane must be at least 3x3, got shape {gray.shape}")
    sm = _smooth(gray, params.sigma)
    gx, gy = _sobel(sm)
    mag = np.hypot(gx, gy)
    keep = _nms(mag, gx, gy)
    return _hysteresis(keep, mag, params.low, params.high)


def image_edges(img: np.ndarray, params: CannyParams = CannyParams()) -> np.ndarray:
    """Canny on the luminance plane of an RGB image."""
    return canny(colorspace.luminance_gray(img), params)
