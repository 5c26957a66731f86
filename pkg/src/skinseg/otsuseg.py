"""Otsu thresholding (binary and multilevel) and per-channel class maps.

Thresholds maximize the between-class variance of the 256-bin histogram over
all contiguous splits, found by exhaustive search. Because the returned
threshold must be reproducible bit-for-bit (including tie-breaks), the
objective is compared in exact integer arithmetic: maximizing sigma_B^2 is
equivalent to maximizing ``sum_c S_c^2 / n_c`` (S_c = class intensity sum,
n_c = class count, empty classes contribute 0), and candidate splits are
compared by cross-multiplying those fractions. Ties resolve to the smallest
threshold (lexicographically smallest vector for k > 2).

Class labels are ordinal: a pixel with value v gets the number of thresholds
strictly below v, so ``v <= t_i`` exactly when ``label <= i``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import colorspace


@dataclass(frozen=True)
class Histogram256:
    bins: tuple[int, ...]

    def __post_init__(self):
        if len(self.bins) != 256:
            raise ValueError("histogram must have exactly 256 bins")
        if any(b < 0 for b in self.bins):
            raise ValueError("histogram bins must be non-negative")

    @property
    def total(self) -> int:
        return sum(self.bins)


@dataclass(frozen=True)
class ChannelClassMaps:
    """Per-channel ordinal Otsu class labels for one image."""

    channels: tuple[colorspace.Channel, ...]
    k: int
    maps: np.ndarray  # (n_channels, h, w) uint8, labels in [0, k-1]
    thresholds: tuple[tuple[int, ...], ...]


def histogram(plane: np.ndarray) -> Histogram256:
    """256-bin histogram of an (h, w) uint8 plane."""
    counts = np.bincount(np.asarray(plane, dtype=np.uint8).ravel(), minlength=256)
    return Histogram256(tuple(int(c) for c in counts))


def _prefix_sums(bins) -> tuple[list[int], list[int]]:
    """cum_n[i] / cum_s[i]: count and intensity sum of values <= i."""
    cum_n, cum_s = [0] * 256, [0] * 256
    n = s = 0
    for v in range(256):
        n += bins[v]
        s += v * bins[v]
        cum_n[v] = n
        cum_s[v] = s
    return cum_n, cum_s


def _objective(cum_n, cum_s, cuts: tuple[int, ...]) -> tuple[int, int]:
    """Between-class objective sum(S_c^2 / n_c) as an exact (num, den) pair.

    ``cuts`` are the k-1 upper bin indices of the first k-1 classes. Empty
    classes have S_c = 0 and are treated as n_c = 1 so they contribute 0.
    """
    bounds = (-1,) + cuts + (255,)
    num, den = 0, 1
    for lo, hi in itertools.pairwise(bounds):
        n = cum_n[hi] - (cum_n[lo] if lo >= 0 else 0)
        s = cum_s[hi] - (cum_s[lo] if lo >= 0 else 0)
        if n == 0:
            continue
        # num/den += s*s/n
        num = num * n + s * s * den
        den *= n
    return num, den


def _degenerate_value(bins) -> int | None:
    """The single occupied bin, or None if the histogram has >= 2 of them."""
    occupied = [v for v in range(256) if bins[v] > 0]
    return occupied[0] if len(occupied) == 1 else None


def otsu_threshold(h: Histogram256) -> tuple[int, bool]:
    """Smallest threshold maximizing between-class variance.

    Returns ``(threshold, degenerate)``; a single-bin histogram with value v
    yields ``min(v, 254)`` flagged degenerate.
    """
    if h.total == 0:
        raise ValueError("empty histogram")
    v = _degenerate_value(h.bins)
    if v is not None:
        return min(v, 254), True
    cum_n, cum_s = _prefix_sums(h.bins)
    best_t, best_num, best_den = 0, -1, 1
    for t in range(255):
        num, den = _objective(cum_n, cum_s, (t,))
        if num * best_den > best_num * den:
            best_t, best_num, best_den = t, num, den
    return best_t, False


def _float_objective_grid(bins) -> np.ndarray:
    """sum(S_c^2 / n_c) in float64 for every (t1, t2) pair, -1 where t2 <= t1.

    Only used to prefilter candidates: every exact maximizer lies within a
    factor (1 - 1e-12) of the float maximum, far above the ~1e-15 relative
    rounding error, so near-ties are re-checked exactly.
    """
    b = np.asarray(bins, dtype=np.float64)
    pn = np.cumsum(b)
    ps = np.cumsum(np.arange(256) * b)
    t = np.arange(255)
    n1 = pn[t][:, None]
    s1 = ps[t][:, None]
    n2 = pn[t][None, :] - n1
    s2 = ps[t][None, :] - s1
    n3 = pn[255] - pn[t][None, :]
    s3 = ps[255] - ps[t][None, :]
    f = (s1 * s1 / np.maximum(n1, 1.0)
         + s2 * s2 / np.maximum(n2, 1.0)
         + s3 * s3 / np.maximum(n3, 1.0))
    f[np.tril_indices(255)] = -1.0  # require t1 < t2
    return f


def _four_class_candidates(bins) -> list[tuple[int, int, int]]:
    """Near-maximal (t1, t2, t3) triples of the 4-class float objective,
    lexicographic order; one 2-D grid per t1, two passes to keep memory flat."""
    b = np.asarray(bins, dtype=np.float64)
    pn = np.cumsum(b)
    ps = np.cumsum(np.arange(256) * b)
    t = np.arange(255)
    n_hi = pn[t]
    s_hi = ps[t]
    n3 = n_hi[None, :] - n_hi[:, None]
    s3 = s_hi[None, :] - s_hi[:, None]
    n4 = pn[255] - n_hi[None, :]
    s4 = ps[255] - s_hi[None, :]
    tail = (s3 * s3 / np.maximum(n3, 1.0)
            + s4 * s4 / np.maximum(n4, 1.0))  # classes (t2, t3], (t3, 255]
    invalid_tail = t[None, :] <= t[:, None]

    def grid_for(t1: int) -> np.ndarray:
        n1, s1 = pn[t1], ps[t1]
        n2 = n_hi[:, None] - n1
        s2 = s_hi[:, None] - s1
        f = s1 * s1 / max(n1, 1.0) + s2 * s2 / np.maximum(n2, 1.0) + tail
        f[invalid_tail] = -1.0
        f[: t1 + 1, :] = -1.0  # require t1 < t2
        return f

    best = max(float(grid_for(t1).max()) for t1 in range(253))
    cutoff = best * (1.0 - 1e-12)
    out = []
    for t1 in range(253):
        for t2, t3 in np.argwhere(grid_for(t1) >= cutoff):
            out.append((t1, int(t2), int(t3)))
    return out


def otsu_multilevel(h: Histogram256, k: int) -> tuple[int, ...]:
    """k-1 ascending thresholds maximizing total between-class variance.

    Exhaustive search over all contiguous k-way splits; ties resolve to the
    lexicographically smallest threshold vector (candidates within float
    rounding of the maximum are re-compared in exact integer arithmetic).
    ``k=2`` reduces exactly to :func:`otsu_threshold`. For a degenerate
    single-bin histogram the first threshold follows the binary degenerate
    rule and the rest pad upward (capped at 254), which keeps all mass in
    class 0.
    """
    if not 2 <= k <= 4:
        raise ValueError(f"k must be in [2, 4], got {k}")
    if h.total == 0:
        raise ValueError("empty histogram")
    v = _degenerate_value(h.bins)
    if v is not None:
        first = min(v, 254)
        return tuple(min(first + i, 254) for i in range(k - 1))
    cum_n, cum_s = _prefix_sums(h.bins)
    if k == 2:
        t, _ = otsu_threshold(h)
        return (t,)
    if k == 3:
        f = _float_objective_grid(h.bins)
        near = np.argwhere(f >= f.max() * (1.0 - 1e-12))
        candidates = [(int(a), int(b)) for a, b in near]  # argwhere is row-major
    else:
        candidates = _four_class_candidates(h.bins)
    best_cuts, best_num, best_den = None, -1, 1
    for cuts in candidates:
        num, den = _objective(cum_n, cum_s, cuts)
        if num * best_den > best_num * den:
            best_cuts, best_num, best_den = cuts, num, den
    return best_cuts


def label_plane(plane: np.ndarray, thresholds: tuple[int, ...]) -> np.ndarray:
    """Ordinal class label per pixel: the number of thresholds below it."""
    t = np.asarray(thresholds)
    return np.searchsorted(t, np.asarray(plane).ravel(), side="left").reshape(
        np.asarray(plane).shape
    ).astype(np.uint8)


def segment_channels(img: np.ndarray, channels, k: int) -> ChannelClassMaps:
    """Otsu-segment every requested channel of an RGB image into k classes."""
    channels = tuple(channels)
    if not channels:
        raise ValueError("channel list must not be empty")
    maps = []
    thresholds = []
    for ch in channels:
        plane = colorspace.extract_plane(img, ch)
        cuts = otsu_multilevel(histogram(plane), k)
        thresholds.append(cuts)
        maps.append(label_plane(plane, cuts))
    return ChannelClassMaps(
        channels=channels, k=k, maps=np.stack(maps), thresholds=tuple(thresholds)
    )


def stretch_labels(labels: np.ndarray, k: int) -> np.ndarray:
    """Spread labels over [0, 255] for debug PNGs (k=3 gives {0, 127, 255})."""
    return (np.asarray(labels, dtype=np.int64) * 255 // (k - 1)).astype(np.uint8)
