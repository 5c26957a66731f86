"""Ground truth handling, confusion metrics and rule/LUT baseline classifiers.

Ground-truth images encode skin as red (255,0,0), non-skin as black (0,0,0)
and ignored pixels as blue (0,0,255); each pixel is assigned to the nearest
reference color by Euclidean RGB distance (ties resolve in that order) and a
pixel farther than 100 from all three is a malformed annotation. Ignored
pixels are excluded from every count.

Division by zero in precision/recall/F yields 0 so degenerate images still
total cleanly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

GT_NONSKIN, GT_SKIN, GT_IGNORE = 0, 1, 2

_GT_REFERENCES = np.array([[255, 0, 0], [0, 0, 0], [0, 0, 255]], dtype=np.int64)
_GT_CODES = np.array([GT_SKIN, GT_NONSKIN, GT_IGNORE], dtype=np.uint8)
_GT_TOLERANCE = 100.0

LUT_VERSION = "skinseg-lut/1"


class MalformedGroundTruthError(ValueError):
    """A ground-truth pixel is too far from every reference color."""


class LutLoadError(ValueError):
    """A persisted LUT model is unreadable."""


@dataclass(frozen=True)
class Confusion:
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    def __add__(self, other: "Confusion") -> "Confusion":
        return Confusion(self.tp + other.tp, self.fp + other.fp,
                         self.tn + other.tn, self.fn + other.fn)


@dataclass(frozen=True)
class LutModel:
    """3-D RGB occurrence histogram over quantized bins."""

    bins_per_channel: int
    counts: np.ndarray  # (b, b, b) int64
    total: int


def load_ground_truth(img: np.ndarray) -> np.ndarray:
    """Decode an (h, w, 3) annotation image into GT_* codes."""
    img = np.asarray(img)
    if img.ndim != 3 or img.shape[2] != 3:
        raise ValueError(f"expected an (h, w, 3) image, got shape {img.shape}")
    diff = img[:, :, None, :].astype(np.int64) - _GT_REFERENCES[None, None, :, :]
    d2 = (diff * diff).sum(axis=3)
    nearest = d2.argmin(axis=2)
    too_far = d2.min(axis=2) > _GT_TOLERANCE * _GT_TOLERANCE
    if too_far.any():
        y, x = np.argwhere(too_far)[0]
        raise MalformedGroundTruthError(
            f"pixel ({int(x)}, {int(y)}) = {tuple(int(v) for v in img[y, x])} "
            f"is farther than {_GT_TOLERANCE:g} from every reference color"
        )
    return _GT_CODES[nearest]


def confusion(mask: np.ndarray, gt: np.ndarray) -> Confusion:
    """Count tp/fp/tn/fn over non-ignored pixels."""
    mask = np.asarray(mask, dtype=bool)
    gt = np.asarray(gt)
    if mask.shape != gt.shape:
        raise ValueError(f"mask shape {mask.shape} != ground truth shape {gt.shape}")
    counted = gt != GT_IGNORE
    skin = gt == GT_SKIN
    return Confusion(
        tp=int((mask & skin).sum()),
        fp=int((mask & counted & ~skin).sum()),
        tn=int((~mask & counted & ~skin).sum()),
        fn=int((~mask & skin).sum()),
    )


def metrics(c: Confusion) -> tuple[float, float, float]:
    """(precision, recall, f_score); any zero denominator yields 0."""
    precision = c.tp / (c.tp + c.fp) if c.tp + c.fp else 0.0
    recall = c.tp / (c.tp + c.fn) if c.tp + c.fn else 0.0
    f = 2.0 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f


def kovac_daylight(rgb: tuple[int, int, int]) -> bool:
    """Published uniform-daylight skin rule (strict inequalities)."""
    r, g, b = rgb
    return (r > 95 and g > 40 and b > 20
            and max(r, g, b) - min(r, g, b) > 15
            and abs(r - g) > 15 and r > g and r > b)


def kovac_flashlight(rgb: tuple[int, int, int]) -> bool:
    """Published flashlight-illumination skin rule."""
    r, g, b = rgb
    return (r > 220 and g > 210 and b > 170
            and abs(r - g) < 15 and r > g and r > b)


def kovac_daylight_image(img: np.ndarray) -> np.ndarray:
    """Vectorized :func:`kovac_daylight` over an (h, w, 3) image."""
    rgb = np.asarray(img, dtype=np.int64)
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    mx = np.maximum(np.maximum(r, g), b)
    mn = np.minimum(np.minimum(r, g), b)
    return ((r > 95) & (g > 40) & (b > 20) & (mx - mn > 15)
            & (np.abs(r - g) > 15) & (r > g) & (r > b))


def kovac_flashlight_image(img: np.ndarray) -> np.ndarray:
    """Vectorized :func:`kovac_flashlight` over an (h, w, 3) image."""
    rgb = np.asarray(img, dtype=np.int64)
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    return ((r > 220) & (g > 210) & (b > 170)
            & (np.abs(r - g) < 15) & (r > g) & (r > b))


def _lut_shift(bins: int) -> int:
    if bins < 1 or bins > 256 or bins & (bins - 1):
        raise ValueError(f"bins must be a power of two <= 256, got {bins}")
    return (256 // bins).bit_length() - 1


def lut_train(skin_pixels, bins: int = 32) -> LutModel:
    """Tally RGB skin pixels into a quantized 3-D occurrence histogram."""
    shift = _lut_shift(bins)
    pix = np.atleast_2d(np.asarray(list(skin_pixels), dtype=np.int64))
    if pix.size == 0:
        raise ValueError("empty training set")
    if pix.shape[1] != 3 or pix.min() < 0 or pix.max() > 255:
        raise ValueError("training pixels must be 8-bit RGB triplets")
    counts = np.zeros((bins, bins, bins), dtype=np.int64)
    q = pix >> shift
    np.add.at(counts, (q[:, 0], q[:, 1], q[:, 2]), 1)
    return LutModel(bins_per_channel=bins, counts=counts, total=int(pix.shape[0]))


def lut_classify(model: LutModel, rgb: tuple[int, int, int], theta: float) -> bool:
    """True when the pixel's bin probability reaches ``theta``."""
    if not 0.0 <= theta <= 1.0:
        raise ValueError(f"theta must lie in [0, 1], got {theta}")
    shift = _lut_shift(model.bins_per_channel)
    r, g, b = (int(v) >> shift for v in rgb)
    return model.counts[r, g, b] / model.total >= theta


def lut_classify_image(model: LutModel, img: np.ndarray, theta: float) -> np.ndarray:
    """Vectorized :func:`lut_classify` over an (h, w, 3) image."""
    if not 0.0 <= theta <= 1.0:
        raise ValueError(f"theta must lie in [0, 1], got {theta}")
    shift = _lut_shift(model.bins_per_channel)
    q = np.asarray(img, dtype=np.int64) >> shift
    return model.counts[q[..., 0], q[..., 1], q[..., 2]] / model.total >= theta


def save_lut(model: LutModel) -> str:
    """Serialize a LUT model to versioned JSON (sparse bin list)."""
    occupied = np.argwhere(model.counts > 0)
    entries = [[int(r), int(g), int(b), int(model.counts[r, g, b])] for r, g, b in occupied]
    return json.dumps({
        "version": LUT_VERSION,
        "bins_per_channel": model.bins_per_channel,
        "total": model.total,
        "counts": entries,
    }) + "\n"


def load_lut(text: str) -> LutModel:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise LutLoadError(f"not valid JSON: {e}") from e
    if not isinstance(doc, dict) or doc.get("version") != LUT_VERSION:
        raise LutLoadError(f"unsupported LUT document (version {doc.get('version')!r})"
                           if isinstance(doc, dict) else "LUT document must be an object")
    try:
        bins = int(doc["bins_per_channel"])
        _lut_shift(bins)  # validates power of two
        counts = np.zeros((bins, bins, bins), dtype=np.int64)
        for r, g, b, n in doc["counts"]:
            counts[r, g, b] = n
        total = int(doc["total"])
    except (KeyError, TypeError, ValueError, IndexError) as e:
        raise LutLoadError(f"malformed LUT document: {e}") from e
    if counts.sum() != total:
        raise LutLoadError("LUT counts do not sum to the recorded total")
    return LutModel(bins_per_channel=bins, counts=counts, total=total)


def metrics_rows(per_image: list[tuple[str, Confusion]]) -> list[dict]:
    """Per-image metric records plus two labeled corpus aggregates.

    ``aggregate_pixels`` recomputes the metrics from the summed confusion
    counts; ``mean_over_images`` carries the same summed counts but averages
    the per-image metrics instead.
    """
    rows = []
    total = Confusion()
    p_sum = r_sum = f_sum = 0.0
    for image_id, c in per_image:
        p, r, f = metrics(c)
        rows.append({"image_id": image_id, "tp": c.tp, "fp": c.fp, "tn": c.tn,
                     "fn": c.fn, "precision": p, "recall": r, "f_score": f})
        total = total + c
        p_sum, r_sum, f_sum = p_sum + p, r_sum + r, f_sum + f
    p, r, f = metrics(total)
    rows.append({"image_id": "aggregate_pixels", "tp": total.tp, "fp": total.fp,
                 "tn": total.tn, "fn": total.fn, "precision": p, "recall": r,
                 "f_score": f})
    n = len(per_image)
    rows.append({"image_id": "mean_over_images", "tp": total.tp, "fp": total.fp,
                 "tn": total.tn, "fn": total.fn,
                 "precision": p_sum / n if n else 0.0,
                 "recall": r_sum / n if n else 0.0,
                 "f_score": f_sum / n if n else 0.0})
    return rows


def metrics_csv(per_image: list[tuple[str, Confusion]]) -> str:
    """CSV text with a header row, one record per image plus the aggregates."""
    lines = ["image_id,tp,fp,tn,fn,precision,recall,f_score"]
    for row in metrics_rows(per_image):
        lines.append(
            f"{row['image_id']},{row['tp']},{row['fp']},{row['tn']},{row['fn']},"
            f"{row['precision']:.6f},{row['recall']:.6f},{row['f_score']:.6f}"
        )
    return "\n".join(lines) + "\n"
