"""Color channel extraction from 8-bit RGB images.

Every channel is produced as an 8-bit plane normalized into [0, 255] using the
channel's fixed theoretical range, never per-image statistics, so trained
models transfer across images. Conventions:

* YCbCr is full-range BT.601 (JPEG):
  Y  = 0.299 R + 0.587 G + 0.114 B
  Cb = 128 - 0.168736 R - 0.331264 G + 0.5 B
  Cr = 128 + 0.5 R - 0.418688 G - 0.081312 B
* HSV is the hexcone model; H is scaled from [0, 360) to [0, 255];
  achromatic pixels get H = 0 and S = 0.
* YIQ uses the NTSC matrix; I and Q are shifted/scaled from their signed
  theoretical ranges into [0, 255].
* XYZ / Lab / Luv use sRGB gamma linearization and the D65 white point
  (white point taken as the matrix row sums so white maps exactly to L=100).
  Lab a/b are offset by +128; Luv u/v use the fixed ranges [-134, 220] and
  [-140, 122]; LCh chroma is stored unscaled (its sRGB maximum is < 255) and
  LCh hue is scaled from [0, 360) like HSV hue.
* CMYK is the naive conversion (K = 1 - max/255; C,M,Y relative to 1-K;
  pure black gets C = M = Y = 0), all scaled to [0, 255].

Quantization everywhere is round-half-away-from-zero, then clamp to [0, 255].

Images are numpy arrays: RGB images are (h, w, 3) uint8, planes are (h, w)
uint8.
"""

from __future__ import annotations

import enum

import numpy as np

# Full-range BT.601 luma/chroma coefficients.
_YCBCR = np.array(
    [
        [0.299, 0.587, 0.114],
        [-0.168736, -0.331264, 0.5],
        [0.5, -0.418688, -0.081312],
    ]
)

# NTSC YIQ chrominance rows (applied to RGB in [0, 1]).
_I_ROW = (0.595716, -0.274453, -0.321263)
_Q_ROW = (0.211456, -0.522591, 0.311135)
_I_MAX = 0.595716
_Q_MAX = 0.522591

# sRGB -> XYZ (D65). White point = row sums, so white maps to (Xn, Yn, Zn).
_XYZ = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ]
)
_XN, _YN, _ZN = (float(row.sum()) for row in _XYZ)

# Fixed 8-bit mapping ranges for CIELUV u*/v* (sRGB extremes fit inside).
_U_MIN, _U_MAX = -134.0, 220.0
_V_MIN, _V_MAX = -140.0, 122.0


class Channel(enum.Enum):
    """All scalar channels the pipeline can extract from an RGB image.

    ``XY`` is the Y of XYZ, ``VV`` the v of Luv, ``LA`` the L of Lab and
    ``HH`` the hue of LCh; the plain names belong to the first color space
    that uses them.
    """

    Y = "Y"
    CB = "Cb"
    CR = "Cr"
    H = "H"
    S = "S"
    V = "V"
    I = "I"  # noqa: E741 - the channel really is called I
    Q = "Q"
    X = "X"
    XY = "Xy"
    Z = "Z"
    C = "C"
    M = "M"
    YE = "Ye"
    K = "K"
    L = "L"
    U = "U"
    VV = "Vv"
    LA = "La"
    A = "A"
    B = "B"
    CH = "Ch"
    HH = "Hh"

    @classmethod
    def from_string(cls, name: str) -> "Channel":
        for ch in cls:
            if ch.value.lower() == name.strip().lower():
                return ch
        raise ValueError(f"unknown channel {name!r}")


#: The seven channels fused by the diffusion stage, in canonical order.
DIFFUSION_CHANNELS = (
    Channel.CB,
    Channel.CR,
    Channel.I,
    Channel.H,
    Channel.U,
    Channel.A,
    Channel.CH,
)


def quantize(values: np.ndarray) -> np.ndarray:
    """Round half away from zero and clamp into [0, 255] as uint8."""
    return np.clip(np.floor(np.asarray(values, dtype=np.float64) + 0.5), 0, 255).astype(np.uint8)


def rgb_to_ycbcr(rgb: tuple[int, int, int]) -> tuple[int, int, int]:
    """Convert one 8-bit RGB triplet to full-range BT.601 (Y, Cb, Cr)."""
    v = _YCBCR @ np.asarray(rgb, dtype=np.float64)
    y, cb, cr = quantize(v + np.array([0.0, 128.0, 128.0]))
    return int(y), int(cb), int(cr)


def ycbcr_planes(img: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized (Y, Cb, Cr) planes of an (h, w, 3) uint8 image."""
    r, g, b = _split(img)
    y = _YCBCR[0, 0] * r + _YCBCR[0, 1] * g + _YCBCR[0, 2] * b
    cb = 128.0 + _YCBCR[1, 0] * r + _YCBCR[1, 1] * g + _YCBCR[1, 2] * b
    cr = 128.0 + _YCBCR[2, 0] * r + _YCBCR[2, 1] * g + _YCBCR[2, 2] * b
    return quantize(y), quantize(cb), quantize(cr)


def ycbcr_triplets(rgb: np.ndarray) -> np.ndarray:
    """Vectorized rgb_to_ycbcr over an (n, 3) array of RGB triplets."""
    v = np.asarray(rgb, dtype=np.float64) @ _YCBCR.T + np.array([0.0, 128.0, 128.0])
    return quantize(v)


def extract_plane(img: np.ndarray, ch: Channel) -> np.ndarray:
    """Extract one channel of ``img`` as an (h, w) uint8 plane."""
    r, g, b = _split(img)
    return quantize(_CONVERTERS[ch](r, g, b))


def luminance_gray(img: np.ndarray) -> np.ndarray:
    """Grayscale plane used by the edge detector; identical to the Y channel."""
    return extract_plane(img, Channel.Y)


def _split(img: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    img = np.asarray(img)
    if img.ndim != 3 or img.shape[2] != 3:
        raise ValueError(f"expected an (h, w, 3) RGB image, got shape {img.shape}")
    f = img.astype(np.float64)
    return f[..., 0], f[..., 1], f[..., 2]


def _srgb_linear(c: np.ndarray) -> np.ndarray:
    c = c / 255.0
    return np.where(c <= 0.04045, c / 12.92, ((c + 0.055) / 1.055) ** 2.4)


def _xyz(r, g, b):
    lr, lg, lb = _srgb_linear(r), _srgb_linear(g), _srgb_linear(b)
    x = _XYZ[0, 0] * lr + _XYZ[0, 1] * lg + _XYZ[0, 2] * lb
    y = _XYZ[1, 0] * lr + _XYZ[1, 1] * lg + _XYZ[1, 2] * lb
    z = _XYZ[2, 0] * lr + _XYZ[2, 1] * lg + _XYZ[2, 2] * lb
    return x, y, z


def _lab_f(t: np.ndarray) -> np.ndarray:
    eps = (6.0 / 29.0) ** 3
    return np.where(t > eps, np.cbrt(t), t / (3.0 * (6.0 / 29.0) ** 2) + 4.0 / 29.0)


def _lab(r, g, b):
    """Unnormalized (L*, a*, b*)."""
    x, y, z = _xyz(r, g, b)
    fx, fy, fz = _lab_f(x / _XN), _lab_f(y / _YN), _lab_f(z / _ZN)
    return 116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)


def _luv(r, g, b):
    """Unnormalized (L*, u*, v*); u* = v* = 0 for black."""
    x, y, z = _xyz(r, g, b)
    lstar = 116.0 * _lab_f(y / _YN) - 16.0
    den = x + 15.0 * y + 3.0 * z
    dn = _XN + 15.0 * _YN + 3.0 * _ZN
    un, vn = 4.0 * _XN / dn, 9.0 * _YN / dn
    safe = np.where(den == 0.0, 1.0, den)
    up = np.where(den == 0.0, un, 4.0 * x / safe)
    vp = np.where(den == 0.0, vn, 9.0 * y / safe)
    return lstar, 13.0 * lstar * (up - un), 13.0 * lstar * (vp - vn)


def _hue_degrees(r, g, b):
    """Hexcone hue in [0, 360); 0 for achromatic pixels."""
    mx = np.maximum(np.maximum(r, g), b)
    mn = np.minimum(np.minimum(r, g), b)
    d = mx - mn
    safe = np.where(d == 0.0, 1.0, d)
    h = np.where(
        mx == r,
        np.mod((g - b) / safe, 6.0),
        np.where(mx == g, (b - r) / safe + 2.0, (r - g) / safe + 4.0),
    )
    return np.where(d == 0.0, 0.0, 60.0 * h)


def _cmyk(r, g, b):
    mx = np.maximum(np.maximum(r, g), b)
    safe = np.where(mx == 0.0, 1.0, mx)
    c = np.where(mx == 0.0, 0.0, (mx - r) / safe) * 255.0
    m = np.where(mx == 0.0, 0.0, (mx - g) / safe) * 255.0
    ye = np.where(mx == 0.0, 0.0, (mx - b) / safe) * 255.0
    k = 255.0 - mx
    return c, m, ye, k


def _conv_y(r, g, b):
    return _YCBCR[0, 0] * r + _YCBCR[0, 1] * g + _YCBCR[0, 2] * b


def _conv_cb(r, g, b):
    return 128.0 + _YCBCR[1, 0] * r + _YCBCR[1, 1] * g + _YCBCR[1, 2] * b


def _conv_cr(r, g, b):
    return 128.0 + _YCBCR[2, 0] * r + _YCBCR[2, 1] * g + _YCBCR[2, 2] * b


def _conv_h(r, g, b):
    return _hue_degrees(r, g, b) * (255.0 / 360.0)


def _conv_s(r, g, b):
    mx = np.maximum(np.maximum(r, g), b)
    mn = np.minimum(np.minimum(r, g), b)
    safe = np.where(mx == 0.0, 1.0, mx)
    return np.where(mx == 0.0, 0.0, (mx - mn) / safe) * 255.0


def _conv_v(r, g, b):
    return np.maximum(np.maximum(r, g), b)


def _conv_i(r, g, b):
    i = (_I_ROW[0] * r + _I_ROW[1] * g + _I_ROW[2] * b) / 255.0
    return (i + _I_MAX) / (2.0 * _I_MAX) * 255.0


def _conv_q(r, g, b):
    q = (_Q_ROW[0] * r + _Q_ROW[1] * g + _Q_ROW[2] * b) / 255.0
    return (q + _Q_MAX) / (2.0 * _Q_MAX) * 255.0


def _conv_x(r, g, b):
    return _xyz(r, g, b)[0] / _XN * 255.0


def _conv_xy(r, g, b):
    return _xyz(r, g, b)[1] / _YN * 255.0


def _conv_z(r, g, b):
    return _xyz(r, g, b)[2] / _ZN * 255.0


def _conv_c(r, g, b):
    return _cmyk(r, g, b)[0]


def _conv_m(r, g, b):
    return _cmyk(r, g, b)[1]


def _conv_ye(r, g, b):
    return _cmyk(r, g, b)[2]


def _conv_k(r, g, b):
    return _cmyk(r, g, b)[3]


def _conv_l(r, g, b):
    return _luv(r, g, b)[0] * 2.55


def _conv_u(r, g, b):
    return (_luv(r, g, b)[1] - _U_MIN) / (_U_MAX - _U_MIN) * 255.0


def _conv_vv(r, g, b):
    return (_luv(r, g, b)[2] - _V_MIN) / (_V_MAX - _V_MIN) * 255.0


def _conv_la(r, g, b):
    return _lab(r, g, b)[0] * 2.55


def _conv_a(r, g, b):
    return _lab(r, g, b)[1] + 128.0


def _conv_b(r, g, b):
    return _lab(r, g, b)[2] + 128.0


def _conv_ch(r, g, b):
    _, a, bb = _lab(r, g, b)
    return np.hypot(a, bb)


def _conv_hh(r, g, b):
    _, a, bb = _lab(r, g, b)
    h = np.degrees(np.arctan2(bb, a))
    return np.mod(h, 360.0) * (255.0 / 360.0)


_CONVERTERS = {
    Channel.Y: _conv_y,
    Channel.CB: _conv_cb,
    Channel.CR: _conv_cr,
    Channel.H: _conv_h,
    Channel.S: _conv_s,
    Channel.V: _conv_v,
    Channel.I: _conv_i,
    Channel.Q: _conv_q,
    Channel.X: _conv_x,
    Channel.XY: _conv_xy,
    Channel.Z: _conv_z,
    Channel.C: _conv_c,
    Channel.M: _conv_m,
    Channel.YE: _conv_ye,
    Channel.K: _conv_k,
    Channel.L: _conv_l,
    Channel.U: _conv_u,
    Channel.VV: _conv_vv,
    Channel.LA: _conv_la,
    Channel.A: _conv_a,
    Channel.B: _conv_b,
    Channel.CH: _conv_ch,
    Channel.HH: _conv_hh,
}
