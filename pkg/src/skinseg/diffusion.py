"""Two-stage 36-ray diffusion of skin labels from seed pixels.

Rays leave every origin at 10-degree resolution (angles counter-clockwise
from +x with the image y axis pointing down) and are rasterized by integer
steps along the dominant axis with round-half-away-from-zero rounding of the
minor-axis *offset*, so a ray's shape is independent of its origin and exact
for multiples of 45 degrees.

Both stages scan the image top-left to bottom-right and cast the 36 rays in
ascending angle order from every origin. Along a ray, a pixel that counts as
already-skin is passed through, an edge pixel terminates the ray, and any
other pixel is scored against the ray's origin (the master pixel):

    S = w_gray * [utp gray] + w_black * [utp black]
        + sum_c w_c * max(0, 1 - |label_master_c - label_utp_c| / (k - 1))

(a white under-test pixel gets no ternary bonus; the traversal normally
skips whites because they are already in the mask). A score >= s_min accepts
the pixel into the mask and the ray continues; below s_min the ray stops.

Stage 1 is self-feeding: origins and the pass-through test both use the
evolving working mask, so pixels accepted above/left of the scan position
become origins in the same pass. Stage 2 is frozen: origins and the
pass-through test both use the origin snapshot (the stage-1 output), which
makes its accepted set a pure function of the snapshot and the stage
idempotent. Edge pixels are never added by either stage.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .otsuseg import ChannelClassMaps
from .seedgen import BLACK, GRAY

#: The 36 ray directions, degrees counter-clockwise from +x.
RAY_ANGLES = tuple(range(0, 360, 10))


@dataclass(frozen=True)
class DiffusionConfig:
    channel_weights: tuple[float, ...]
    w_gray: float = 2.0
    w_black: float = 0.0
    s_min: float = 7.0
    max_ray_len: int = 0  # 0 = bounded only by the image

    def __post_init__(self):
        if any(w < 0 for w in self.channel_weights):
            raise ValueError("channel weights must be non-negative")
        if self.w_gray < 0 or self.w_black < 0:
            raise ValueError("ternary weights must be non-negative")
        if self.max_ray_len < 0:
            raise ValueError("max_ray_len must be >= 0")


def default_config(channels) -> DiffusionConfig:
    """Default weights: 2 for Cb and Cr, 1 for every other channel."""
    weights = tuple(2.0 if ch.value in ("Cb", "Cr") else 1.0 for ch in channels)
    return DiffusionConfig(channel_weights=weights)


def _round_half_away(v: np.ndarray) -> np.ndarray:
    return np.where(v >= 0, np.floor(v + 0.5), np.ceil(v - 0.5))


def _angle_offsets(angle: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    """(dx, dy) offsets of the first n ray pixels for one angle."""
    rad = math.radians(angle)
    ux, uy = math.cos(rad), -math.sin(rad)  # y axis points down
    i = np.arange(1, n + 1, dtype=np.float64)
    if abs(ux) >= abs(uy):
        sx = 1 if ux > 0 else -1
        slope = uy / abs(ux)
        dx = (i * sx).astype(np.int64)
        dy = _round_half_away(i * slope).astype(np.int64)
    else:
        sy = 1 if uy > 0 else -1
        slope = ux / abs(uy)
        dx = _round_half_away(i * slope).astype(np.int64)
        dy = (i * sy).astype(np.int64)
    return dx, dy


_GEOMETRY_CACHE: dict[tuple[int, int, int], tuple[np.ndarray, np.ndarray]] = {}


def _ray_geometry(w: int, h: int, max_len: int) -> tuple[np.ndarray, np.ndarray]:
    """(36, n) arrays of dx/dy offsets for all rays, cached per image size."""
    key = (w, h, max_len)
    cached = _GEOMETRY_CACHE.get(key)
    if cached is not None:
        return cached
    n = max(w, h)
    if max_len > 0:
        n = min(n, max_len)
    dx = np.empty((len(RAY_ANGLES), n), dtype=np.int32)
    dy = np.empty((len(RAY_ANGLES), n), dtype=np.int32)
    for row, angle in enumerate(RAY_ANGLES):
        dx[row], dy[row] = _angle_offsets(angle, n)
    geom = (dx, dy)
    _GEOMETRY_CACHE[key] = geom
    return geom


def ray_pixels(origin: tuple[int, int], angle: float, bounds: tuple[int, int],
               max_len: int = 0) -> list[tuple[int, int]]:
    """Ordered pixels along the ray from ``origin`` (excluded) at ``angle``.

    ``bounds`` is (width, height); the ray stops at the image border or after
    ``max_len`` pixels (0 = unbounded). Any angle is accepted; diffusion
    itself only casts the 36 directions in :data:`RAY_ANGLES`.
    """
    w, h = bounds
    x0, y0 = origin
    if not (0 <= x0 < w and 0 <= y0 < h):
        raise ValueError(f"origin {origin} outside {w}x{h}")
    n = max(w, h)
    if max_len > 0:
        n = min(n, max_len)
    dx, dy = _angle_offsets(angle, n)
    out = []
    for ox, oy in zip(dx, dy):
        x, y = x0 + int(ox), y0 + int(oy)
        if not (0 <= x < w and 0 <= y < h):
            break
        out.append((x, y))
    return out


def diffusion_score(utp_ternary: int, master_labels, utp_labels, k: int,
                    cfg: DiffusionConfig) -> float:
    """Eq-style acceptance score of one under-test pixel against one master."""
    master_labels = tuple(master_labels)
    utp_labels = tuple(utp_labels)
    if len(master_labels) != len(cfg.channel_weights) or len(utp_labels) != len(cfg.channel_weights):
        raise ValueError("label vectors must match the configured channel count")
    s = 0.0
    if utp_ternary == GRAY:
        s += cfg.w_gray
    elif utp_ternary == BLACK:
        s += cfg.w_black
    for w_c, m, u in zip(cfg.channel_weights, master_labels, utp_labels):
        s += w_c * max(0.0, 1.0 - abs(int(m) - int(u)) / (k - 1))
    return s


def _check_dims(seed, ternary, classes: ChannelClassMaps, edges):
    shape = np.asarray(seed).shape
    for name, arr in (("ternary", ternary), ("edges", edges)):
        if np.asarray(arr).shape != shape:
            raise ValueError(f"{name} shape {np.asarray(arr).shape} != seed shape {shape}")
    if classes.maps.shape[1:] != shape:
        raise ValueError(f"class maps shape {classes.maps.shape[1:]} != seed shape {shape}")


def diffuse_stage(seed: np.ndarray, ternary: np.ndarray, classes: ChannelClassMaps,
                  edges: np.ndarray, cfg: DiffusionConfig, stage: int,
                  origins: np.ndarray | None = None) -> np.ndarray:
    """Run one diffusion stage and return the grown boolean mask.

    ``origins`` (stage 2 only) overrides the origin/pass-through snapshot
    while ``seed`` still initializes the working mask; by default the seed is
    the snapshot. Stage 1 ignores ``origins``.
    """
    if stage not in (1, 2):
        raise ValueError("stage must be 1 or 2")
    _check_dims(seed, ternary, classes, edges)
    if len(cfg.channel_weights) != len(classes.channels):
        raise ValueError("channel_weights must align with the class maps' channels")

    h, w = np.asarray(seed).shape
    npix = h * w
    work = np.asarray(seed, dtype=bool).ravel().copy()
    edge_flat = np.asarray(edges, dtype=bool).ravel()
    tern_flat = np.asarray(ternary).ravel()
    labels = np.ascontiguousarray(
        np.asarray(classes.maps, dtype=np.int16).reshape(len(classes.channels), npix).T
    )
    wvec = np.asarray(cfg.channel_weights, dtype=np.float64)
    k = classes.k
    fac = np.array([max(0.0, 1.0 - d / (k - 1)) for d in range(k)], dtype=np.float64)
    bonus = np.where(tern_flat == GRAY, cfg.w_gray,
                     np.where(tern_flat == BLACK, cfg.w_black, 0.0))

    ray_dx, ray_dy = _ray_geometry(w, h, cfg.max_ray_len)
    n_rays, n_steps = ray_dx.shape
    chunk = min(n_steps, 64)

    def sweep(row_origin: np.ndarray, row_angle: np.ndarray,
              skip_mask: np.ndarray) -> np.ndarray:
        """Walk a batch of rays (one row per (origin, angle)) to completion
        and return the flat indices of the pixels they accept.

        Nothing is committed to the working mask here. The result is exact
        for any batch whose rows share one origin (a pixel accepted by an
        earlier ray re-scores identically for the same master, so a stale
        pass-through read cannot change an outcome) and for arbitrary
        batches when ``skip_mask`` is static (stage 2).
        """
        ox = (row_origin % w).astype(np.int32)
        oy = (row_origin // w).astype(np.int32)
        cur_angle = row_angle
        cur_origin = row_origin
        accepted = []
        for start in range(0, n_steps, chunk):
            xs = ray_dx[cur_angle, start:start + chunk] + ox[:, None]
            ys = ray_dy[cur_angle, start:start + chunk] + oy[:, None]
            width = xs.shape[1]
            valid = (xs >= 0) & (xs < w) & (ys >= 0) & (ys < h)
            idx = ys * w + xs
            idx[~valid] = 0
            skipv = skip_mask[idx]
            skipv &= valid
            edgev = edge_flat[idx]
            edgev &= valid
            edgev &= ~skipv  # pass-through outranks the barrier
            scored = valid & ~skipv & ~edgev
            blocked = ~valid | edgev
            if scored.any():
                sr, sc = np.nonzero(scored)
                ci = idx[sr, sc]
                s = bonus[ci] + fac[np.abs(labels[ci] - labels[cur_origin[sr]])] @ wvec
                fail = s < cfg.s_min
                blocked[sr[fail], sc[fail]] = True
                first = np.where(blocked.any(axis=1), blocked.argmax(axis=1), width)
                hit = ci[~fail & (sc < first[sr])]
                if hit.size:
                    accepted.append(hit)
            else:
                first = np.where(blocked.any(axis=1), blocked.argmax(axis=1), width)
            alive = first == width
            if not alive.any() or start + chunk >= n_steps:
                break
            cur_angle = cur_angle[alive]
            cur_origin = cur_origin[alive]
            ox = ox[alive]
            oy = oy[alive]
        if accepted:
            return np.concatenate(accepted)
        return np.empty(0, dtype=np.int64)

    angles = np.arange(n_rays)
    batch = 32
    if stage == 1:
        # Origins interact through the evolving mask, so the scan is strict
        # raster order. Batches of origins are probed speculatively against
        # the frozen mask: a batch that accepts nothing is provably identical
        # to processing its origins one by one (the first origin sees the
        # same mask and adds nothing, hence so does the next, and so on);
        # a batch that would accept something is discarded and its pixel
        # range replayed origin by origin.
        p = 0
        while p < npix:
            group = []
            q = p
            while q < npix and len(group) < batch:
                if work[q]:
                    group.append(q)
                q += 1
            if not group:
                break
            probe = sweep(np.repeat(np.asarray(group), n_rays),
                          np.tile(angles, len(group)), work)
            if probe.size:
                for r in range(p, q):
                    if work[r]:
                        acc = sweep(np.full(n_rays, r), angles, work)
                        if acc.size:
                            work[acc] = True
            p = q
    else:
        # stage-2 traversals read only static data, so origins are fully
        # independent and can share sweeps
        snap = (np.asarray(origins, dtype=bool).ravel().copy() if origins is not None
                else np.asarray(seed, dtype=bool).ravel().copy())
        origin_idx = np.flatnonzero(snap)
        for i in range(0, len(origin_idx), batch):
            group = origin_idx[i:i + batch]
            acc = sweep(np.repeat(group, n_rays), np.tile(angles, len(group)), snap)
            if acc.size:
                work[acc] = True

    return work.reshape(h, w)


def diffuse(seed: np.ndarray, ternary: np.ndarray, classes: ChannelClassMaps,
            edges: np.ndarray, cfg: DiffusionConfig) -> np.ndarray:
    """Stage 1 from the seed, then stage 2 from the stage-1 output."""
    stage1 = diffuse_stage(seed, ternary, classes, edges, cfg, stage=1)
    return diffuse_stage(stage1, ternary, classes, edges, cfg, stage=2)
