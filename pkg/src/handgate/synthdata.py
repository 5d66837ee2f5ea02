"""Synthetic stand-in imagery: hands, decoys, and cluttered backdrops.

The real hand datasets behind the original experiments are not
redistributable, so every experiment and test here runs on procedurally
generated look-alikes:

* genuine hands — a parametric silhouette (palm ellipse, four finger
  capsules, angled thumb, wrist stub) whose proportions are drawn once per
  subject and then re-rendered with per-sample jitter, illumination ramp,
  and skin texture.  Two renders of one subject play the role of the two
  same-class photos a challenge embeds; three or more samples per subject
  feed the biometric experiments.
* fake hands — cartoons, flat gloves, emoticons, and shape doodles that are
  obviously not the genuine class but fill the decoy cells.
* backgrounds — soft color fields with blotches, the canvas the clutter
  stage scribbles over.

Geometry is parameterized in relative units so one subject renders
consistently at any canvas size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import cv2
import numpy as np
from PIL import Image, ImageDraw

from .imaging import make_rng

__all__ = [
    "HandParams",
    "subject_params",
    "render_hand",
    "make_fake_image",
    "make_background",
    "make_population",
    "write_stores",
]

# Baseline finger proportions, index..little, as fractions of the longest
# allowed finger; per-subject multipliers perturb these.
_BASE_LENGTHS = (0.74, 0.86, 0.80, 0.60)
_BASE_WIDTHS = (0.80, 0.86, 0.82, 0.68)


@dataclass(frozen=True)
class HandParams:
    """Subject-identity geometry, in canvas-relative units."""

    finger_lengths: tuple[float, float, float, float]
    finger_widths: tuple[float, float, float, float]
    palm_w: float
    palm_h: float
    thumb_len: float
    thumb_width: float
    thumb_angle_deg: float
    skin_rgb: tuple[int, int, int]
    texture_amp: float


def subject_params(seed: int) -> HandParams:
    """Draw one subject's hand geometry from a per-subject stream."""
    rng = make_rng(seed)
    lengths = tuple(
        float(b * rng.uniform(0.9, 1.1)) for b in _BASE_LENGTHS
    )
    widths = tuple(
        float(b * rng.uniform(0.85, 1.15)) for b in _BASE_WIDTHS
    )
    base = np.array([205, 165, 135], float)
    tint = base + rng.uniform(-18, 18, 3)
    return HandParams(
        finger_lengths=lengths,  # type: ignore[arg-type]
        finger_widths=widths,  # type: ignore[arg-type]
        palm_w=float(rng.uniform(0.46, 0.56)),
        palm_h=float(rng.uniform(0.30, 0.36)),
        thumb_len=float(rng.uniform(0.16, 0.22)),
        thumb_width=float(rng.uniform(0.055, 0.075)),
        thumb_angle_deg=float(rng.uniform(30, 45)),
        skin_rgb=tuple(int(c) for c in tint.clip(120, 240)),  # type: ignore[arg-type]
        texture_amp=float(rng.uniform(3.0, 14.0)),
    )


def _capsule(draw: ImageDraw.ImageDraw, p0, p1, width: float, fill: int) -> None:
    """Thick line with round caps: a finger or thumb silhouette."""
    draw.line([p0, p1], fill=fill, width=max(int(round(width)), 1))
    r = width / 2.0
    for x, y in (p0, p1):
        draw.ellipse([x - r, y - r, x + r, y + r], fill=fill)


def hand_mask(params: HandParams, size: tuple[int, int], with_wrist: bool = True) -> np.ndarray:
    """Render the binary silhouette of a hand, fingers pointing up."""
    w, h = size
    im = Image.new("L", (w, h), 0)
    d = ImageDraw.Draw(im)

    cx = w / 2.0
    palm_w = params.palm_w * w
    palm_h = params.palm_h * h
    palm_top = h * 0.50
    palm_cy = palm_top + palm_h / 2.0
    d.ellipse(
        [cx - palm_w / 2, palm_cy - palm_h / 2, cx + palm_w / 2, palm_cy + palm_h / 2],
        fill=255,
    )
    if with_wrist:
        ww = palm_w * 0.46
        d.rectangle([cx - ww / 2, palm_cy + palm_h * 0.30, cx + ww / 2, h - 2], fill=255)

    # Four fingers rise from just inside the palm top edge.
    max_len = 0.42 * h
    slot = palm_w / 4.0
    base_w = slot * 0.62
    for i in range(4):
        fx = cx - palm_w / 2 + (i + 0.5) * slot
        fl = params.finger_lengths[i] * max_len
        fw = params.finger_widths[i] * base_w
        y0 = palm_top + palm_h * 0.18
        y1 = max(palm_top - fl, fw / 2 + 2)
        _capsule(d, (fx, y0), (fx, y1), fw, 255)

    # Thumb leaves the palm's left flank at an angle.
    ang = math.radians(params.thumb_angle_deg)
    tx0 = cx - palm_w / 2 + palm_w * 0.08
    ty0 = palm_cy - palm_h * 0.10
    tl = params.thumb_len * h
    tx1 = tx0 - tl * math.sin(ang)
    ty1 = ty0 - tl * math.cos(ang)
    _capsule(d, (tx0, ty0), (tx1, ty1), params.thumb_width * w * 2.2, 255)

    return np.asarray(im, np.uint8)


def render_hand(
    params: HandParams,
    rng: np.random.Generator,
    size: tuple[int, int] = (200, 260),
    with_wrist: bool = True,
) -> np.ndarray:
    """One photographic-ish sample of a subject's hand on a dark field."""
    w, h = size
    mask = hand_mask(params, size, with_wrist=with_wrist)

    # Per-sample pose jitter keeps two renders of one subject non-identical.
    angle = rng.uniform(-3.0, 3.0)
    dx, dy = rng.uniform(-3.0, 3.0, 2)
    m = cv2.getRotationMatrix2D((w / 2, h / 2), angle, 1.0)
    m[0, 2] += dx
    m[1, 2] += dy
    mask = cv2.warpAffine(mask, m, (w, h), flags=cv2.INTER_NEAREST)

    bg_level = rng.uniform(18, 32)
    img = np.empty((h, w, 3), np.float64)
    img[:] = bg_level
    img += rng.normal(0.0, 2.0, (h, w, 3))

    # Illumination ramp across a random direction plus skin texture; the
    # texture amplitude is a subject trait so quality-metric spreads vary
    # realistically across the population.
    yy, xx = np.mgrid[0:h, 0:w]
    theta = rng.uniform(0, 2 * math.pi)
    ramp = (xx * math.cos(theta) + yy * math.sin(theta)) / max(w, h)
    shade = 1.0 + 0.10 * (ramp - ramp.mean())
    skin = np.array(params.skin_rgb, np.float64)
    tex = rng.normal(0.0, params.texture_amp, (h, w))
    sample_gain = rng.uniform(0.92, 1.08)
    hand_px = mask > 0
    for c in range(3):
        chan = (skin[c] * sample_gain) * shade + tex
        img[..., c][hand_px] = chan[hand_px]

    img = np.clip(img, 0, 255).astype(np.uint8)
    img = cv2.GaussianBlur(img, (3, 3), 0.6)
    return img


def _fake_cartoon(d: ImageDraw.ImageDraw, w: int, h: int, rng) -> None:
    color = tuple(int(c) for c in rng.integers(60, 256, 3))
    outline = (0, 0, 0)
    cx, cy = w / 2, h * 0.62
    d.ellipse([cx - w * 0.28, cy - h * 0.20, cx + w * 0.28, cy + h * 0.20],
              fill=color, outline=outline, width=3)
    for i in range(3):
        fx = cx + (i - 1) * w * 0.17
        _capsule(d, (fx, cy - h * 0.12), (fx, cy - h * rng.uniform(0.32, 0.45)),
                 w * 0.13, color)


def _fake_glove(d: ImageDraw.ImageDraw, w: int, h: int, rng) -> None:
    color = tuple(int(c) for c in rng.integers(40, 256, 3))
    params = subject_params(int(rng.integers(0, 2**31)))
    mask = hand_mask(params, (w, h))
    ys, xs = np.nonzero(mask)
    pts = list(zip(xs.tolist(), ys.tolist()))
    step = max(len(pts) // 4000, 1)
    for x, y in pts[::step]:
        d.point((x, y), fill=color)
    # flat fill via polygon of the mask bbox is crude; draw the mask directly
    d.bitmap((0, 0), Image.fromarray(mask), fill=color)
    d.rectangle([w * 0.25, h * 0.86, w * 0.75, h - 2],
                fill=tuple(int(c) for c in rng.integers(40, 256, 3)))


def _fake_emoticon(d: ImageDraw.ImageDraw, w: int, h: int, rng) -> None:
    color = tuple(int(c) for c in rng.integers(120, 256, 3))
    r = min(w, h) * 0.36
    cx, cy = w / 2, h / 2
    d.ellipse([cx - r, cy - r, cx + r, cy + r], fill=color, outline=(0, 0, 0), width=3)
    er = r * 0.12
    for sx in (-0.38, 0.38):
        d.ellipse([cx + sx * r - er, cy - 0.32 * r - er,
                   cx + sx * r + er, cy - 0.32 * r + er], fill=(0, 0, 0))
    d.arc([cx - 0.55 * r, cy - 0.15 * r, cx + 0.55 * r, cy + 0.62 * r],
          20, 160, fill=(0, 0, 0), width=4)


def _fake_doodle(d: ImageDraw.ImageDraw, w: int, h: int, rng) -> None:
    for _ in range(int(rng.integers(4, 9))):
        color = tuple(int(c) for c in rng.integers(0, 256, 3))
        x, y = rng.uniform(0.1 * w, 0.9 * w), rng.uniform(0.1 * h, 0.9 * h)
        s = rng.uniform(0.08, 0.22) * min(w, h)
        if rng.random() < 0.5:
            d.ellipse([x - s, y - s, x + s, y + s], fill=color)
        else:
            n = int(rng.integers(3, 7))
            pts = [(x + s * math.cos(2 * math.pi * k / n + rng.uniform(0, 1)),
                    y + s * math.sin(2 * math.pi * k / n + rng.uniform(0, 1)))
                   for k in range(n)]
            d.polygon(pts, fill=color)


def make_fake_image(
    rng: np.random.Generator, size: tuple[int, int] = (200, 260)
) -> np.ndarray:
    """A decoy image: clearly hand-adjacent or hand-unrelated, never genuine."""
    w, h = size
    bg = int(rng.integers(12, 40))
    im = Image.new("RGB", (w, h), (bg, bg, bg))
    d = ImageDraw.Draw(im)
    style = rng.choice(["cartoon", "glove", "emoticon", "doodle"])
    if style == "cartoon":
        _fake_cartoon(d, w, h, rng)
    elif style == "glove":
        _fake_glove(d, w, h, rng)
    elif style == "emoticon":
        _fake_emoticon(d, w, h, rng)
    else:
        _fake_doodle(d, w, h, rng)
    arr = np.asarray(im, np.uint8).copy()
    if rng.random() < 0.5:
        noise = rng.normal(0, rng.uniform(1, 6), arr.shape)
        arr = np.clip(arr.astype(np.float64) + noise, 0, 255).astype(np.uint8)
    return arr


def make_background(
    rng: np.random.Generator, size: tuple[int, int] = (460, 460)
) -> np.ndarray:
    """A soft, blotchy color field for the challenge canvas."""
    w, h = size
    base = rng.uniform(35, 95, 3)
    img = np.empty((h, w, 3), np.float64)
    yy, xx = np.mgrid[0:h, 0:w]
    theta = rng.uniform(0, 2 * math.pi)
    ramp = (xx * math.cos(theta) + yy * math.sin(theta)) / max(w, h)
    for c in range(3):
        img[..., c] = base[c] * (1.0 + 0.25 * (ramp - ramp.mean()))
    pil = Image.fromarray(np.clip(img, 0, 255).astype(np.uint8))
    d = ImageDraw.Draw(pil, "RGBA")
    for _ in range(int(rng.integers(5, 12))):
        color = tuple(int(c) for c in rng.integers(0, 200, 3)) + (int(rng.integers(30, 90)),)
        x, y = rng.uniform(0, w), rng.uniform(0, h)
        rx, ry = rng.uniform(0.1, 0.4, 2) * min(w, h)
        d.ellipse([x - rx, y - ry, x + rx, y + ry], fill=color)
    arr = np.asarray(pil, np.float64)
    arr += rng.normal(0, 3.0, arr.shape)
    return np.clip(arr, 0, 255).astype(np.uint8)


def make_population(
    n_subjects: int,
    samples_per_subject: int,
    seed: int,
    size: tuple[int, int] = (200, 260),
    with_wrist: bool = True,
) -> dict[str, list[np.ndarray]]:
    """Render a biometric population: subject label -> list of samples."""
    root = make_rng(seed)
    out: dict[str, list[np.ndarray]] = {}
    for i in range(n_subjects):
        sid = f"subj{i:04d}"
        params = subject_params(int(root.integers(0, 2**62)))
        sample_rng = make_rng(int(root.integers(0, 2**62)))
        out[sid] = [
            render_hand(params, sample_rng, size=size, with_wrist=with_wrist)
            for _ in range(samples_per_subject)
        ]
    return out


def write_stores(
    root_dir,
    n_backgrounds: int = 8,
    n_genuine_classes: int = 12,
    n_fakes: int = 30,
    seed: int = 0,
    hand_size: tuple[int, int] = (200, 200),
) -> None:
    """Materialize background/genuine/fake stores in the on-disk layout.

    genuine/<class>/<1|2>.png, background/<label>.png, fake/<label>.png.
    """
    from pathlib import Path

    from .imaging import save_png

    root = Path(root_dir)
    rng = make_rng(seed)
    bg_dir = root / "background"
    bg_dir.mkdir(parents=True, exist_ok=True)
    for i in range(n_backgrounds):
        save_png(bg_dir / f"bg{i:03d}.png", make_background(rng))
    g_dir = root / "genuine"
    for i in range(n_genuine_classes):
        cls = g_dir / f"class{i:03d}"
        cls.mkdir(parents=True, exist_ok=True)
        params = subject_params(int(rng.integers(0, 2**62)))
        for s in (1, 2):
            save_png(cls / f"{s}.png",
                     render_hand(params, rng, size=hand_size, with_wrist=False))
    f_dir = root / "fake"
    f_dir.mkdir(parents=True, exist_ok=True)
    for i in range(n_fakes):
        save_png(f_dir / f"fake{i:03d}.png", make_fake_image(rng, size=hand_size))
