"""Independent reference implementations the tests check the package against.

Everything here is written directly from the documented behavior, favoring
obvious, loop-based code over speed, and deliberately shares no code with
the package internals.
"""

from __future__ import annotations

import math

import numpy as np


# ---------------------------------------------------------------------------
# Otsu: exhaustive between-class variance scans with exact arithmetic

def _prefix(bins):
    cn = [0] * 257
    cs = [0] * 257
    for v in range(256):
        cn[v + 1] = cn[v] + bins[v]
        cs[v + 1] = cs[v] + v * bins[v]
    return cn, cs


def exhaustive_otsu_binary(bins) -> int:
    """Smallest t in [0, 254] maximizing sum(S_c^2/n_c) over {<=t, >t}."""
    cn, cs = _prefix(bins)
    total_n, total_s = cn[256], cs[256]
    best_t, best_num, best_den = 0, -1, 1
    for t in range(255):
        n0, s0 = cn[t + 1], cs[t + 1]
        n1, s1 = total_n - n0, total_s - s0
        # objective as an exact fraction; empty classes contribute nothing
        num, den = 0, 1
        for n, s in ((n0, s0), (n1, s1)):
            if n:
                num = num * n + s * s * den
                den *= n
        if num * best_den > best_num * den:
            best_t, best_num, best_den = t, num, den
    return best_t


def exhaustive_otsu_pairs(bins) -> tuple[int, int]:
    """Lexicographically smallest (t1, t2) maximizing the 3-class objective."""
    cn, cs = _prefix(bins)
    total_n, total_s = cn[256], cs[256]
    best = None
    best_num, best_den = -1, 1
    for t1 in range(254):
        n1, s1 = cn[t1 + 1], cs[t1 + 1]
        a1 = s1 * s1
        for t2 in range(t1 + 1, 255):
            n2 = cn[t2 + 1] - n1
            s2 = cs[t2 + 1] - s1
            n3 = total_n - cn[t2 + 1]
            s3 = total_s - cs[t2 + 1]
            num, den = 0, 1
            for n, s2q in ((n1, a1), (n2, s2 * s2), (n3, s3 * s3)):
                if n:
                    num = num * n + s2q * den
                    den *= n
            if num * best_den > best_num * den:
                best, best_num, best_den = (t1, t2), num, den
    return best


# ---------------------------------------------------------------------------
# Diffusion: literal simulation of the documented traversal

def round_half_away(z: float) -> int:
    return math.floor(z + 0.5) if z >= 0 else math.ceil(z - 0.5)


def ray_offsets(angle_deg: float, n: int) -> list[tuple[int, int]]:
    rad = math.radians(angle_deg)
    ux, uy = math.cos(rad), -math.sin(rad)
    out = []
    if abs(ux) >= abs(uy):
        sx = 1 if ux > 0 else -1
        slope = uy / abs(ux)
        for i in range(1, n + 1):
            out.append((i * sx, round_half_away(i * slope)))
    else:
        sy = 1 if uy > 0 else -1
        slope = ux / abs(uy)
        for i in range(1, n + 1):
            out.append((round_half_away(i * slope), i * sy))
    return out


def simulate_diffusion_stage(seed, ternary, label_maps, k, edges, channel_weights,
                             w_gray, w_black, s_min, stage, max_ray_len=0):
    """Straightforward simulation of one diffusion stage.

    ``label_maps`` is (n_channels, h, w). Stage 1 reads the evolving mask for
    both origin selection and pass-through; stage 2 freezes both to the seed
    snapshot.
    """
    h, w = seed.shape
    work = seed.copy()
    snap = seed.copy()
    n = max(w, h)
    if max_ray_len > 0:
        n = min(n, max_ray_len)
    offsets = [ray_offsets(a, n) for a in range(0, 360, 10)]

    def score(ox, oy, x, y):
        s = 0.0
        t = ternary[y, x]
        if t == 128:
            s += w_gray
        elif t == 0:
            s += w_black
        for c in range(label_maps.shape[0]):
            d = abs(int(label_maps[c, oy, ox]) - int(label_maps[c, y, x]))
            s += channel_weights[c] * max(0.0, 1.0 - d / (k - 1))
        return s

    passthrough = work if stage == 1 else snap
    for oy in range(h):
        for ox in range(w):
            if not passthrough[oy, ox]:
                continue
            for ray in offsets:
                for dx, dy in ray:
                    x, y = ox + dx, oy + dy
                    if not (0 <= x < w and 0 <= y < h):
                        break
                    if passthrough[y, x]:
                        continue
                    if edges[y, x]:
                        break
                    if score(ox, oy, x, y) >= s_min:
                        work[y, x] = True
                    else:
                        break
    return work


def random_diffusion_instance(rng, h=32, w=32, n_channels=7, k=3,
                              seed_density=0.04, edge_density=0.06):
    seed = rng.rand(h, w) < seed_density
    ternary = rng.choice([0, 128, 255], size=(h, w), p=[0.3, 0.5, 0.2]).astype(np.uint8)
    edges = rng.rand(h, w) < edge_density
    labels = rng.randint(0, k, size=(n_channels, h, w)).astype(np.uint8)
    return seed, ternary, labels, edges


# ---------------------------------------------------------------------------
# Seed refinement: scalar scan with explicit traversal order

def refine_reference(ternary, k, th1, th2, reverse=False):
    h, w = ternary.shape
    out = ternary.copy()
    coords = [(x, y) for y in range(h) for x in range(w)]
    if reverse:
        coords.reverse()
    for x, y in coords:
        if not (2 <= x < w - 2 and 2 <= y < h - 2):
            continue
        if ternary[y, x] == 255:
            continue
        t_sum = 0
        phi_sum = 0
        for dy in range(-2, 3):
            for dx in range(-2, 3):
                if dx == 0 and dy == 0:
                    continue
                v = ternary[y + dy, x + dx]
                c = 1 if v == 255 else (-1 if v == 0 else 0)
                if max(abs(dx), abs(dy)) == 1:
                    t_sum += c
                else:
                    phi_sum += c
        zeta = k * t_sum + phi_sum
        if zeta > th2:
            out[y, x] = 255
        elif zeta < th1:
            out[y, x] = 0
    return out


# ---------------------------------------------------------------------------
# Convex hull: gift wrapping

def gift_wrap_hull(points):
    """CCW hull by gift wrapping, starting at the lexicographically smallest
    point, collinear intermediates dropped; None for degenerate inputs."""
    pts = sorted(set(map(tuple, points)))
    if len(pts) < 3:
        return None

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    def dist2(a, b):
        return (a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2

    start = pts[0]
    hull = [start]
    current = start
    while True:
        candidate = None
        for p in pts:
            if p == current:
                continue
            if candidate is None:
                candidate = p
                continue
            c = cross(current, candidate, p)
            if c < 0 or (c == 0 and dist2(current, p) > dist2(current, candidate)):
                candidate = p
        if candidate == start:
            break
        hull.append(candidate)
        current = candidate
        if len(hull) > len(pts):
            raise RuntimeError("gift wrap failed to terminate")
    if len(hull) < 3:
        return None
    return hull


# ---------------------------------------------------------------------------
# Canny: direct dense computation for small instances

def canny_reference(plane, sigma, low, high):
    """Direct four-stage Canny on one small instance (mirror-pad smoothing,
    interior Sobel, forward-biased NMS, component hysteresis)."""
    a = plane.astype(np.float64)
    h, w = a.shape
    radius = math.ceil(3.0 * sigma)
    xs = np.arange(-radius, radius + 1, dtype=np.float64)
    kern = np.exp(-(xs * xs) / (2.0 * sigma * sigma))
    kern /= kern.sum()

    def mirror(i, n):
        # repeat-edge mirror: ... 1 0 | 0 1 2 ... n-1 | n-1 n-2 ...
        while i < 0 or i >= n:
            if i < 0:
                i = -i - 1
            else:
                i = 2 * n - 1 - i
        return i

    sm = np.zeros_like(a)
    for y in range(h):
        for x in range(w):
            acc = 0.0
            for j, kj in enumerate(kern):
                acc += kj * a[y, mirror(x - radius + j, w)]
            sm[y, x] = acc
    sm2 = np.zeros_like(a)
    for y in range(h):
        for x in range(w):
            acc = 0.0
            for j, kj in enumerate(kern):
                acc += kj * sm[mirror(y - radius + j, h), x]
            sm2[y, x] = acc

    gx = np.zeros_like(a)
    gy = np.zeros_like(a)
    for y in range(1, h - 1):
        for x in range(1, w - 1):
            gx[y, x] = ((sm2[y - 1, x + 1] + 2 * sm2[y, x + 1] + sm2[y + 1, x + 1])
                        - (sm2[y - 1, x - 1] + 2 * sm2[y, x - 1] + sm2[y + 1, x - 1]))
            gy[y, x] = ((sm2[y + 1, x - 1] + 2 * sm2[y + 1, x] + sm2[y + 1, x + 1])
                        - (sm2[y - 1, x - 1] + 2 * sm2[y - 1, x] + sm2[y - 1, x + 1]))
    mag = np.hypot(gx, gy)

    keep = np.zeros((h, w), dtype=bool)
    for y in range(1, h - 1):
        for x in range(1, w - 1):
            if mag[y, x] <= 0:
                continue
            ang = math.degrees(math.atan2(gy[y, x], gx[y, x])) % 180.0
            if ang < 22.5 or ang >= 157.5:
                fwd, back = mag[y, x + 1], mag[y, x - 1]
            elif ang < 67.5:
                fwd, back = mag[y + 1, x + 1], mag[y - 1, x - 1]
            elif ang < 112.5:
                fwd, back = mag[y + 1, x], mag[y - 1, x]
            else:
                fwd, back = mag[y + 1, x - 1], mag[y - 1, x + 1]
            keep[y, x] = mag[y, x] > fwd and mag[y, x] >= back

    strong = keep & (mag >= high)
    weak = keep & (mag >= low)
    edges = strong.copy()
    stack = list(zip(*np.nonzero(strong)))
    while stack:
        y, x = stack.pop()
        for dy in (-1, 0, 1):
            for dx in (-1, 0, 1):
                yy, xx = y + dy, x + dx
                if 0 <= yy < h and 0 <= xx < w and weak[yy, xx] and not edges[yy, xx]:
                    edges[yy, xx] = True
                    stack.append((yy, xx))
    return edges


def connected_components_8(mask):
    """List of pixel-index sets, one per 8-connected component."""
    h, w = mask.shape
    seen = np.zeros_like(mask, dtype=bool)
    comps = []
    for y in range(h):
        for x in range(w):
            if not mask[y, x] or seen[y, x]:
                continue
            comp = []
            stack = [(y, x)]
            seen[y, x] = True
            while stack:
                cy, cx = stack.pop()
                comp.append((cy, cx))
                for dy in (-1, 0, 1):
                    for dx in (-1, 0, 1):
                        ny, nx = cy + dy, cx + dx
                        if (0 <= ny < h and 0 <= nx < w and mask[ny, nx]
                                and not seen[ny, nx]):
                            seen[ny, nx] = True
                            stack.append((ny, nx))
            comps.append(comp)
    return comps
