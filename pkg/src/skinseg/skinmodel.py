"""Nested-polygon skin cluster model over the YCb, YCr and CbCr planes.

Training tallies skin pixels into three 256x256 density maps, one per
chrominance plane (the first named component of a plane is the first
coordinate of its points). Each map yields a pair of convex polygons:

* inner: convex hull of bin centers whose (optionally 3x3 box smoothed)
  density reaches ``tau_in`` times the peak density;
* outer: convex hull of bin centers whose smoothed density reaches
  ``max(tau_out * total, 1)``, unioned with the inner point set so the pair
  is nested for every input.

The box filter normalizes by the in-bounds neighborhood size, so a uniform
map stays uniform. Point sets with fewer than 3 non-collinear points expand
to an axis-aligned square of side 3 centered on the set's centroid (for an
empty set: the centroid of all occupied bins), clipped to [0, 255]^2.

A pixel is T1 when its three plane projections fall inside all inner
polygons, T2 when inside all outer polygons but not T1, and T3 otherwise.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field

import numpy as np

MODEL_VERSION = "skinseg-polygon/1"

PLANE_IDS = ("YCb", "YCr", "CbCr")


class TrainingError(ValueError):
    """Raised when a model cannot be trained from the given pixels."""


class ModelLoadError(ValueError):
    """Base class for model deserialization failures."""


class ModelVersionError(ModelLoadError):
    """The stream carries an unknown format version."""


class ModelFormatError(ModelLoadError):
    """The stream is not a well-formed model document."""


class MissingPlaneError(ModelLoadError):
    """The stream lacks one of the three required planes."""


class TernaryClass(enum.Enum):
    T1 = 1
    T2 = 2
    T3 = 3


@dataclass(frozen=True)
class Polygon:
    """Convex polygon in bin coordinates, counter-clockwise, starting at the
    lexicographically smallest vertex."""

    vertices: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if len(self.vertices) < 3:
            raise ValueError("polygon needs at least 3 vertices")
        for a, b in self.vertices:
            if not (0 <= a <= 255 and 0 <= b <= 255):
                raise ValueError(f"vertex {(a, b)} outside [0, 255]^2")


@dataclass(frozen=True)
class PolygonPair:
    inner: Polygon
    outer: Polygon


@dataclass(frozen=True)
class TrainParams:
    tau_in: float = 0.05
    tau_out: float = 1e-6
    smoothing: bool = True


@dataclass
class DensityMap:
    """256x256 tally of skin pixels projected onto one chrominance plane."""

    plane_id: str
    bins: np.ndarray = field(default_factory=lambda: np.zeros((256, 256), dtype=np.int64))

    @property
    def total(self) -> int:
        return int(self.bins.sum())


@dataclass(frozen=True)
class SkinClusterModel:
    version: str
    planes: dict[str, PolygonPair]
    train_params: TrainParams


def accumulate_density(skin_pixels) -> dict[str, DensityMap]:
    """Tally (Y, Cb, Cr) triplets into the three plane density maps."""
    pix = np.atleast_2d(np.asarray(list(skin_pixels), dtype=np.int64))
    if pix.size == 0:
        raise TrainingError("no skin pixels to train on")
    if pix.shape[1] != 3:
        raise TrainingError(f"expected (Y, Cb, Cr) triplets, got shape {pix.shape}")
    if pix.min() < 0 or pix.max() > 255:
        raise TrainingError("pixel components must lie in [0, 255]")
    y, cb, cr = pix[:, 0], pix[:, 1], pix[:, 2]
    maps = {}
    for plane_id, first, second in (("YCb", y, cb), ("YCr", y, cr), ("CbCr", cb, cr)):
        m = DensityMap(plane_id)
        np.add.at(m.bins, (first, second), 1)
        maps[plane_id] = m
    return maps


def _box_smooth(bins: np.ndarray) -> np.ndarray:
    """3x3 mean filter normalized by the in-bounds neighborhood size."""
    acc = np.zeros(bins.shape, dtype=np.float64)
    cnt = np.zeros(bins.shape, dtype=np.float64)
    ones = np.ones(bins.shape, dtype=np.float64)
    src = bins.astype(np.float64)
    for dr in (-1, 0, 1):
        for dc in (-1, 0, 1):
            rs = slice(max(dr, 0), bins.shape[0] + min(dr, 0))
            rd = slice(max(-dr, 0), bins.shape[0] + min(-dr, 0))
            cs = slice(max(dc, 0), bins.shape[1] + min(dc, 0))
            cd = slice(max(-dc, 0), bins.shape[1] + min(-dc, 0))
            acc[rd, cd] += src[rs, cs]
            cnt[rd, cd] += ones[rs, cs]
    return acc / cnt


def _cross(o, a, b) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points: list[tuple[int, int]]) -> list[tuple[int, int]]:
    """Monotone-chain hull, CCW, collinear points dropped; may return fewer
    than 3 vertices for degenerate inputs."""
    pts = sorted(set(map(tuple, points)))
    if len(pts) <= 2:
        return pts
    lower = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:  # all points collinear
        return pts
    # monotone chain starts at the lexicographically smallest point already
    return hull


def _degenerate_square(pts: list[tuple[int, int]], fallback_centroid) -> Polygon:
    if pts:
        ca = sum(p[0] for p in pts) / len(pts)
        cb = sum(p[1] for p in pts) / len(pts)
    else:
        ca, cb = fallback_centroid
    ra = int(math.floor(ca + 0.5))
    rb = int(math.floor(cb + 0.5))
    a0, a1 = max(ra - 1, 0), min(ra + 1, 255)
    b0, b1 = max(rb - 1, 0), min(rb + 1, 255)
    return Polygon(((a0, b0), (a1, b0), (a1, b1), (a0, b1)))


def _hull_polygon(pts: list[tuple[int, int]], fallback_centroid) -> Polygon:
    hull = convex_hull(pts)
    if len(hull) < 3 or all(_cross(hull[0], hull[i], hull[i + 1]) == 0 for i in range(1, len(hull) - 1)):
        return _degenerate_square(pts, fallback_centroid)
    return Polygon(tuple(hull))


def estimate_polygons(dmap: DensityMap, tau_in: float, tau_out: float,
                      smoothing: bool = True) -> PolygonPair:
    """Fit the nested inner/outer polygon pair to one density map."""
    total = dmap.total
    if total == 0:
        raise TrainingError(f"density map {dmap.plane_id} is empty")
    density = _box_smooth(dmap.bins) if smoothing else dmap.bins.astype(np.float64)
    occupied = np.argwhere(dmap.bins > 0)
    fallback = (float(occupied[:, 0].mean()), float(occupied[:, 1].mean()))

    inner_pts = [(int(a), int(b)) for a, b in np.argwhere(density >= tau_in * density.max())]
    outer_thr = max(tau_out * total, 1.0)
    outer_pts = [(int(a), int(b)) for a, b in np.argwhere(density >= outer_thr)]
    outer_pts = sorted(set(outer_pts) | set(inner_pts))  # keep the pair nested

    return PolygonPair(
        inner=_hull_polygon(inner_pts, fallback),
        outer=_hull_polygon(outer_pts, fallback),
    )


def train_model(skin_pixels, params: TrainParams = TrainParams()) -> SkinClusterModel:
    """Train a model from (Y, Cb, Cr) skin pixel triplets."""
    maps = accumulate_density(skin_pixels)
    planes = {
        pid: estimate_polygons(maps[pid], params.tau_in, params.tau_out, params.smoothing)
        for pid in PLANE_IDS
    }
    return SkinClusterModel(version=MODEL_VERSION, planes=planes, train_params=params)


def point_in_polygon(poly: Polygon, p: tuple[int, int]) -> bool:
    """True iff ``p`` is inside or on the boundary (polygon is convex, CCW)."""
    v = poly.vertices
    for i in range(len(v)):
        if _cross(v[i], v[(i + 1) % len(v)], p) < 0:
            return False
    return True


def polygon_mask(poly: Polygon) -> np.ndarray:
    """Inclusive membership over the full 256x256 integer grid.

    Bit-identical to calling :func:`point_in_polygon` on every grid point;
    used to classify whole images without a per-pixel Python loop.
    """
    aa, bb = np.meshgrid(np.arange(256, dtype=np.int64), np.arange(256, dtype=np.int64),
                         indexing="ij")
    inside = np.ones((256, 256), dtype=bool)
    v = poly.vertices
    for i in range(len(v)):
        (a1, b1), (a2, b2) = v[i], v[(i + 1) % len(v)]
        inside &= (a2 - a1) * (bb - b1) - (b2 - b1) * (aa - a1) >= 0
    return inside


def _projections(ycbcr: tuple[int, int, int]) -> dict[str, tuple[int, int]]:
    y, cb, cr = ycbcr
    return {"YCb": (y, cb), "YCr": (y, cr), "CbCr": (cb, cr)}


def classify_pixel(model: SkinClusterModel, ycbcr: tuple[int, int, int]) -> TernaryClass:
    """Classify one (Y, Cb, Cr) triplet into T1/T2/T3."""
    proj = _projections(ycbcr)
    if all(point_in_polygon(model.planes[pid].inner, proj[pid]) for pid in PLANE_IDS):
        return TernaryClass.T1
    if all(point_in_polygon(model.planes[pid].outer, proj[pid]) for pid in PLANE_IDS):
        return TernaryClass.T2
    return TernaryClass.T3


def save_model(model: SkinClusterModel) -> str:
    """Serialize to a versioned JSON document (integer vertices only)."""
    doc = {
        "version": model.version,
        "train_params": {
            "tau_in": model.train_params.tau_in,
            "tau_out": model.train_params.tau_out,
            "smoothing": model.train_params.smoothing,
        },
        "planes": {
            pid: {
                "inner": [list(v) for v in pair.inner.vertices],
                "outer": [list(v) for v in pair.outer.vertices],
            }
            for pid, pair in model.planes.items()
        },
    }
    return json.dumps(doc, indent=2) + "\n"


def _parse_polygon(raw, pid: str, which: str) -> Polygon:
    if not isinstance(raw, list) or len(raw) < 3:
        raise ModelFormatError(f"plane {pid}: {which} polygon needs >= 3 vertices")
    verts = []
    for v in raw:
        if (not isinstance(v, list) or len(v) != 2
                or not all(isinstance(c, int) and 0 <= c <= 255 for c in v)):
            raise ModelFormatError(f"plane {pid}: bad {which} vertex {v!r}")
        verts.append((v[0], v[1]))
    return Polygon(tuple(verts))


def load_model(text: str) -> SkinClusterModel:
    """Parse a document produced by :func:`save_model`.

    Raises :class:`ModelVersionError`, :class:`MissingPlaneError` or
    :class:`ModelFormatError` for the respective defects.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ModelFormatError(f"not valid JSON: {e}") from e
    if not isinstance(doc, dict):
        raise ModelFormatError("model document must be a JSON object")
    version = doc.get("version")
    if version != MODEL_VERSION:
        raise ModelVersionError(f"unsupported model version {version!r}")
    raw_planes = doc.get("planes")
    if not isinstance(raw_planes, dict):
        raise ModelFormatError("missing 'planes' object")
    planes = {}
    for pid in PLANE_IDS:
        if pid not in raw_planes:
            raise MissingPlaneError(f"plane {pid} missing from model")
        entry = raw_planes[pid]
        if not isinstance(entry, dict) or "inner" not in entry or "outer" not in entry:
            raise ModelFormatError(f"plane {pid} must carry 'inner' and 'outer'")
        planes[pid] = PolygonPair(
            inner=_parse_polygon(entry["inner"], pid, "inner"),
            outer=_parse_polygon(entry["outer"], pid, "outer"),
        )
    raw_params = doc.get("train_params")
    if not isinstance(raw_params, dict):
        raise ModelFormatError("missing 'train_params' object")
    try:
        params = TrainParams(
            tau_in=float(raw_params["tau_in"]),
            tau_out=float(raw_params["tau_out"]),
            smoothing=bool(raw_params["smoothing"]),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise ModelFormatError(f"bad train_params: {e}") from e
    return SkinClusterModel(version=version, planes=planes, train_params=params)
