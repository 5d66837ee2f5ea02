"""Shared raster primitives for challenge synthesis and quality analysis.

Images are numpy arrays in row-major order: ``(H, W)`` for grayscale,
``(H, W, 3)`` for RGB.  dtype encodes the intensity mode: ``uint8`` for
[0, 255] integer images, floating dtypes for [0, 1] (or derived) real
images.  All randomness flows through an explicit ``numpy.random.Generator``
so that a fixed seed plus a fixed call sequence reproduces output exactly.

The primitives here are the building blocks of the challenge pipeline
(blending, gamma correction, opening, impulse noise, composite geometric
distortion) and of the quality-metric stage (grayscale conversion, the
sigma=0.5 reference degradation, entropy diagnostics).
"""

from __future__ import annotations

import math

import cv2
import numpy as np
from PIL import Image

__all__ = [
    "make_rng",
    "load_png",
    "save_png",
    "to_grayscale",
    "gaussian_degrade",
    "degrade_kernel",
    "entropy",
    "conditional_entropy",
    "alpha_blend",
    "gamma_correct",
    "morphological_open",
    "salt_pepper_noise",
    "composite_transform",
    "rotated_bbox",
]

# Reference-degradation kernel parameters: 3x3, sigma = 0.5, unit sum.
_DEGRADE_SIGMA = 0.5
_DEGRADE_SIZE = 3

# Opening radius bounds; the generator draws radii from this closed range.
OPEN_RADIUS_MIN = 5
OPEN_RADIUS_MAX = 10

# Impulse-noise density bounds.
NOISE_DENSITY_MIN = 0.02
NOISE_DENSITY_MAX = 0.05


def make_rng(seed: int | np.random.Generator | None) -> np.random.Generator:
    """Return a deterministic random generator for the given seed.

    Passing an existing generator returns it unchanged so pipelines can
    thread one stream through every stage of a task.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def load_png(path) -> np.ndarray:
    """Read an 8-bit PNG as a uint8 array, grayscale or RGB."""
    with Image.open(path) as im:
        if im.mode not in ("L", "RGB"):
            im = im.convert("RGB")
        return np.asarray(im, dtype=np.uint8).copy()


def save_png(path, img: np.ndarray) -> None:
    """Write a uint8 grayscale or RGB array as PNG."""
    arr = np.asarray(img)
    if arr.dtype != np.uint8:
        raise ValueError("PNG output requires uint8 intensities")
    Image.fromarray(arr).save(path, format="PNG")


def _require_gray(img: np.ndarray, op: str) -> np.ndarray:
    arr = np.asarray(img)
    if arr.ndim != 2:
        raise ValueError(f"{op} expects a single-channel image")
    return arr


def to_grayscale(img: np.ndarray) -> np.ndarray:
    """Convert RGB to luminance with BT.601 weights; grayscale passes through.

    out = round(0.299 R + 0.587 G + 0.114 B), uint8.
    """
    arr = np.asarray(img)
    if arr.ndim == 2:
        return arr.copy() if arr is img else arr
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError("to_grayscale expects an RGB or grayscale image")
    rgb = arr.astype(np.float64)
    y = 0.299 * rgb[..., 0] + 0.587 * rgb[..., 1] + 0.114 * rgb[..., 2]
    return np.rint(y).clip(0, 255).astype(np.uint8)


def degrade_kernel() -> np.ndarray:
    """The normalized 3x3 Gaussian kernel at sigma = 0.5."""
    half = _DEGRADE_SIZE // 2
    xs = np.arange(-half, half + 1, dtype=np.float64)
    g1 = np.exp(-(xs**2) / (2.0 * _DEGRADE_SIGMA**2))
    k = np.outer(g1, g1)
    return k / k.sum()


def gaussian_degrade(img: np.ndarray) -> np.ndarray:
    """Blur a grayscale image with the 3x3 sigma=0.5 kernel, edges replicated.

    This is the self-reference degradation every quality metric compares
    against.  Returns float64 so downstream metric arithmetic keeps full
    precision.
    """
    arr = _require_gray(img, "gaussian_degrade")
    if arr.shape[0] < _DEGRADE_SIZE or arr.shape[1] < _DEGRADE_SIZE:
        raise ValueError("degenerate image: both dimensions must be >= 3")
    src = arr.astype(np.float64)
    return cv2.filter2D(src, -1, degrade_kernel(), borderType=cv2.BORDER_REPLICATE)


def _histogram256(img: np.ndarray) -> np.ndarray:
    arr = np.asarray(img)
    if arr.dtype != np.uint8:
        quantized = np.rint(np.asarray(arr, dtype=np.float64)).clip(0, 255)
        arr = quantized.astype(np.uint8)
    return np.bincount(arr.ravel(), minlength=256).astype(np.float64)


def entropy(img: np.ndarray) -> float:
    """Shannon entropy in bits over the 256-bin intensity histogram."""
    arr = _require_gray(img, "entropy")
    if arr.size == 0:
        raise ValueError("entropy of an empty image is undefined")
    counts = _histogram256(arr)
    p = counts[counts > 0] / counts.sum()
    return float(-(p * np.log2(p)).sum())


def conditional_entropy(u: np.ndarray, v: np.ndarray) -> float:
    """H(U|V) in bits from the positionwise joint 256x256 histogram.

    H(U|V) = H(U,V) - H(V); pixels are paired by position, so the inputs
    must share dimensions.
    """
    ua = _require_gray(u, "conditional_entropy")
    va = _require_gray(v, "conditional_entropy")
    if ua.shape != va.shape:
        raise ValueError("conditional_entropy requires equal dimensions")

    def _as_u8(a: np.ndarray) -> np.ndarray:
        if a.dtype != np.uint8:
            a = np.rint(a.astype(np.float64)).clip(0, 255).astype(np.uint8)
        return a

    uu = _as_u8(ua).ravel().astype(np.int64)
    vv = _as_u8(va).ravel().astype(np.int64)
    joint = np.bincount(uu * 256 + vv, minlength=256 * 256).astype(np.float64)
    n = joint.sum()
    pj = joint[joint > 0] / n
    h_uv = float(-(pj * np.log2(pj)).sum())
    pv = np.bincount(vv, minlength=256).astype(np.float64) / n
    pv = pv[pv > 0]
    h_v = float(-(pv * np.log2(pv)).sum())
    return max(h_uv - h_v, 0.0)


def alpha_blend(fg: np.ndarray, bg: np.ndarray, alpha: float) -> np.ndarray:
    """out = alpha*fg + (1-alpha)*bg, rounded back to the input dtype."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    a = np.asarray(fg)
    b = np.asarray(bg)
    if a.shape != b.shape:
        raise ValueError("alpha_blend requires matching shapes")
    out = alpha * a.astype(np.float64) + (1.0 - alpha) * b.astype(np.float64)
    if a.dtype == np.uint8:
        return np.rint(out).clip(0, 255).astype(np.uint8)
    return out


def gamma_correct(img: np.ndarray, gamma: float) -> np.ndarray:
    """Power-law remap out = 255*(in/255)^(1/gamma); gamma > 1 brightens."""
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    arr = np.asarray(img)
    if arr.dtype == np.uint8:
        lut = np.rint(255.0 * (np.arange(256) / 255.0) ** (1.0 / gamma))
        lut = lut.clip(0, 255).astype(np.uint8)
        return lut[arr]
    scaled = np.clip(arr.astype(np.float64) / 255.0, 0.0, 1.0)
    return 255.0 * scaled ** (1.0 / gamma)


def _disk_element(radius: int) -> np.ndarray:
    span = np.arange(-radius, radius + 1)
    yy, xx = np.meshgrid(span, span, indexing="ij")
    return (yy**2 + xx**2 <= radius**2).astype(np.uint8)


def morphological_open(img: np.ndarray, radius: int) -> np.ndarray:
    """Grayscale opening (erode then dilate) with a discrete disk element."""
    if not OPEN_RADIUS_MIN <= radius <= OPEN_RADIUS_MAX:
        raise ValueError(
            f"opening radius must lie in [{OPEN_RADIUS_MIN}, {OPEN_RADIUS_MAX}]"
        )
    arr = np.asarray(img)
    kernel = _disk_element(int(radius))
    return cv2.morphologyEx(arr, cv2.MORPH_OPEN, kernel)


def salt_pepper_noise(
    img: np.ndarray, density: float, rng: np.random.Generator
) -> np.ndarray:
    """Replace each pixel with probability `density` by 0 or 255, evenly.

    Multichannel pixels are corrupted whole, so impulses stay pure black or
    white rather than random primaries.
    """
    if not NOISE_DENSITY_MIN <= density <= NOISE_DENSITY_MAX:
        raise ValueError(
            f"noise density must lie in [{NOISE_DENSITY_MIN}, {NOISE_DENSITY_MAX}]"
        )
    arr = np.asarray(img)
    out = arr.copy()
    hw = arr.shape[:2]
    hit = rng.random(hw) < density
    salt = rng.random(hw) < 0.5
    white = np.uint8(255) if arr.dtype == np.uint8 else 255.0
    black = np.uint8(0) if arr.dtype == np.uint8 else 0.0
    out[hit & salt] = white
    out[hit & ~salt] = black
    return out


def rotated_bbox(width: int, height: int, angle_deg: float) -> tuple[int, int]:
    """Bounding-box size of a width x height rectangle rotated by angle_deg.

    Uses ceil of the exact trigonometric extent; values are snapped to 9
    decimals first so right angles do not pick up a spurious extra pixel.
    """
    theta = math.radians(angle_deg)
    c, s = abs(math.cos(theta)), abs(math.sin(theta))
    bw = math.ceil(round(width * c + height * s, 9))
    bh = math.ceil(round(width * s + height * c, 9))
    return bw, bh


def composite_transform(
    img: np.ndarray,
    scale_to: tuple[int, int],
    angle: float,
    offset: tuple[int, int],
    canvas: np.ndarray,
    roi: np.ndarray | None = None,
    resample: str = "bilinear",
) -> np.ndarray:
    """Scale, rotate, then overlay an image onto a canvas at an offset.

    The distortion order is size -> rotation -> translation.  Only pixels
    inside the image's region of interest replace canvas pixels; `roi` is an
    optional mask (nonzero = keep) in source geometry, defaulting to the full
    frame.  The rotated bounding box must fit inside the canvas at `offset`,
    otherwise a placement-overflow error is raised.
    """
    arr = np.asarray(img)
    cv = np.asarray(canvas)
    tw, th = int(scale_to[0]), int(scale_to[1])
    if tw <= 0 or th <= 0:
        raise ValueError("scale_to must be positive")
    if resample == "bilinear":
        interp = cv2.INTER_LINEAR
    elif resample == "nearest":
        interp = cv2.INTER_NEAREST
    else:
        raise ValueError("resample must be 'bilinear' or 'nearest'")

    scaled = cv2.resize(arr, (tw, th), interpolation=interp)
    if roi is None:
        mask = np.full((th, tw), 255, np.uint8)
    else:
        mask = (np.asarray(roi) > 0).astype(np.uint8) * 255
        mask = cv2.resize(mask, (tw, th), interpolation=cv2.INTER_NEAREST)

    bw, bh = rotated_bbox(tw, th, angle)
    # Rotation matrix about the scaled image's center, recentred so the
    # rotated footprint lands wholly inside the (bw, bh) target frame.
    m = cv2.getRotationMatrix2D(((tw - 1) / 2.0, (th - 1) / 2.0), angle, 1.0)
    m[0, 2] += (bw - tw) / 2.0
    m[1, 2] += (bh - th) / 2.0
    rotated = cv2.warpAffine(scaled, m, (bw, bh), flags=interp)
    rmask = cv2.warpAffine(mask, m, (bw, bh), flags=cv2.INTER_NEAREST)

    ox, oy = int(offset[0]), int(offset[1])
    ch, cw = cv.shape[:2]
    if ox < 0 or oy < 0 or ox + bw > cw or oy + bh > ch:
        raise ValueError("placement overflow: transformed image exceeds canvas")

    out = cv.copy()
    region = out[oy : oy + bh, ox : ox + bw]
    keep = rmask > 0
    if region.ndim == 3 and rotated.ndim == 2:
        rotated = np.repeat(rotated[..., None], region.shape[2], axis=2)
    if region.ndim == 3:
        region[keep, :] = rotated[keep, :]
    else:
        region[keep] = rotated[keep]
    return out
