"""Hand-image challenge generation and solution checking.

The generation pipeline, in order: pick a backdrop, scribble 300 translucent
shapes over it, soften them with a grayscale opening, sprinkle impulse
noise, keep a copy of that cluttered field, composite two photos of one
genuine hand plus five-to-seven decoys onto distinct cells of a 3x3 grid
(each hand randomly resized and rotated, only its silhouette pixels
overwrite the field), alpha-blend the composed canvas back onto the kept
copy so the hands sink into the clutter, and finally gamma-brighten the
result.  The solver must name the two grid cells holding the genuine hands
within the session time limit.

Grid cells are numbered 1..9 in column-major order: 1-2-3 down the left
column, 4-5-6 down the middle, 7-8-9 down the right.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field, asdict
from pathlib import Path

import cv2
import numpy as np
from PIL import Image, ImageDraw

from . import imaging
from .imaging import make_rng

__all__ = [
    "TIME_LIMIT_SECONDS",
    "ShapeSpec",
    "ChallengeSpec",
    "GridLayout",
    "ImageStore",
    "Challenge",
    "SolutionResult",
    "LayoutFailure",
    "clutter_background",
    "extract_roi_mask",
    "place_hands",
    "generate_challenge",
    "verify_solution",
    "entropy_gap_report",
    "save_challenge",
    "load_challenge",
]

# Hard ceiling on a graded response's age; later submissions flag a bot.
TIME_LIMIT_SECONDS = 30.0

_SHAPE_KINDS = ("circle", "rectangle", "star")
_SHAPE_SIZE_MIN = 5
_SHAPE_SIZE_MAX = 30


class LayoutFailure(RuntimeError):
    """Raised when hand placement cannot satisfy the layout constraints."""


@dataclass(frozen=True)
class ShapeSpec:
    """One clutter shape: kind, anchor, bounding size, fill, and opacity."""

    kind: str
    position: tuple[int, int]
    size: int
    color: tuple[int, int, int]
    opacity: float

    def __post_init__(self) -> None:
        if self.kind not in _SHAPE_KINDS:
            raise ValueError(f"unknown shape kind {self.kind!r}")
        if self.size > _SHAPE_SIZE_MAX:
            raise ValueError("shape size exceeds the 30 px ceiling")
        if not 0.0 <= self.opacity <= 1.0:
            raise ValueError("opacity must lie in [0, 1]")


@dataclass(frozen=True)
class ChallengeSpec:
    """Generator configuration; defaults follow the published setup."""

    canvas: tuple[int, int] = (460, 460)
    n_genuine: int = 2
    n_fake: int | None = None  # None: draw uniformly from [5, 7] per challenge
    shapes_per_kind: int = 100
    alpha: float = 0.25
    gamma: float = 2.5
    hand_size_range: tuple[int, int] = (100, 150)
    rotation_range: float = 25.0
    noise_density_range: tuple[float, float] = (0.02, 0.05)
    open_radius_range: tuple[int, int] = (5, 10)
    spacing: int = 4
    retry_budget: int = 50
    resample: str = "bilinear"

    def __post_init__(self) -> None:
        if self.n_genuine != 2:
            raise ValueError("exactly two genuine placements are required")
        if self.n_fake is not None and not 5 <= self.n_fake <= 7:
            raise ValueError("n_fake must lie in [5, 7]")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")


@dataclass(frozen=True)
class GridLayout:
    """The 3x3 cell decomposition of a canvas, labels column-major 1..9."""

    canvas: tuple[int, int]
    rows: int = 3
    cols: int = 3

    @property
    def labels(self) -> range:
        return range(1, self.rows * self.cols + 1)

    def cell_rect(self, label: int) -> tuple[int, int, int, int]:
        """(x0, y0, x1, y1) of a cell, right/bottom edges exclusive."""
        if label not in self.labels:
            raise ValueError(f"label {label} outside 1..{self.rows * self.cols}")
        col, row = divmod(label - 1, self.rows)
        w, h = self.canvas
        x0 = round(col * w / self.cols)
        x1 = round((col + 1) * w / self.cols)
        y0 = round(row * h / self.rows)
        y1 = round((row + 1) * h / self.rows)
        return x0, y0, x1, y1

    def label_at(self, x: float, y: float) -> int:
        w, h = self.canvas
        col = min(int(x * self.cols / w), self.cols - 1)
        row = min(int(y * self.rows / h), self.rows - 1)
        return col * self.rows + row + 1


@dataclass
class ImageStore:
    """Label-indexed image collection backing one role of the generator.

    kind 'genuine' maps each class label to exactly two same-hand images;
    'background' and 'fake' map a label to one image.  Sources may be file
    paths (the on-disk layout) or in-memory arrays (tests, synthesis).
    """

    kind: str
    entries: dict[str, list]

    def __post_init__(self) -> None:
        if self.kind not in ("background", "genuine", "fake"):
            raise ValueError(f"unknown store kind {self.kind!r}")
        for label, sources in self.entries.items():
            if self.kind == "genuine" and len(sources) != 2:
                raise ValueError(
                    f"genuine class {label!r} must hold exactly 2 images"
                )
            if self.kind != "genuine" and len(sources) != 1:
                raise ValueError(f"{self.kind} label {label!r} must hold 1 image")

    @property
    def labels(self) -> list[str]:
        return sorted(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def load(self, label: str) -> list[np.ndarray]:
        out = []
        for src in self.entries[label]:
            if isinstance(src, np.ndarray):
                out.append(src)
            else:
                out.append(imaging.load_png(src))
        return out

    @classmethod
    def from_dir(cls, path, kind: str) -> "ImageStore":
        root = Path(path)
        if not root.is_dir():
            raise FileNotFoundError(f"store directory {root} does not exist")
        entries: dict[str, list] = {}
        if kind == "genuine":
            for cls_dir in sorted(p for p in root.iterdir() if p.is_dir()):
                pair = [cls_dir / "1.png", cls_dir / "2.png"]
                if not all(p.exists() for p in pair):
                    raise ValueError(f"class {cls_dir.name} lacks 1.png/2.png")
                entries[cls_dir.name] = pair
        else:
            for png in sorted(root.glob("*.png")):
                entries[png.stem] = [png]
        return cls(kind=kind, entries=entries)

    @classmethod
    def in_memory(cls, kind: str, images: dict[str, list[np.ndarray]]) -> "ImageStore":
        return cls(kind=kind, entries={k: list(v) for k, v in images.items()})


@dataclass
class Challenge:
    """A rendered challenge plus everything the server must remember."""

    image: np.ndarray
    truth: tuple[int, int]
    genuine_class: str
    occupied_cells: frozenset[int]
    created_at: float
    spec: ChallengeSpec
    seed: int
    fake_labels: tuple[str, ...] = ()
    background_label: str = ""

    def __post_init__(self) -> None:
        if len(set(self.truth)) != 2:
            raise ValueError("truth must name two distinct cells")
        if not set(self.truth) <= set(self.occupied_cells):
            raise ValueError("truth cells must be occupied")
        if not 7 <= len(self.occupied_cells) <= 9:
            raise ValueError("occupied cell count must lie in [7, 9]")

    @property
    def id(self) -> str:
        return f"{self.seed:016x}"

    def client_payload(self) -> dict:
        """What a solver may see: no truth, no class labels."""
        return {
            "id": self.id,
            "seed": self.seed,
            "occupied_cells": sorted(self.occupied_cells),
            "created_at": self.created_at,
            "spec": asdict(self.spec),
        }


@dataclass(frozen=True)
class SolutionResult:
    status: str  # accept | reject | timeout
    reason: str | None = None

    @property
    def accepted(self) -> bool:
        return self.status == "accept"


def _draw_shape(draw: ImageDraw.ImageDraw, shape: ShapeSpec) -> None:
    x, y = shape.position
    s = shape.size
    fill = shape.color + (int(round(shape.opacity * 255)),)
    if shape.kind == "circle":
        draw.ellipse([x, y, x + s, y + s], fill=fill)
    elif shape.kind == "rectangle":
        draw.rectangle([x, y, x + s, y + s], fill=fill)
    else:
        cx, cy = x + s / 2.0, y + s / 2.0
        outer = s / 2.0
        inner = outer * 0.5
        pts = []
        for k in range(10):
            r = outer if k % 2 == 0 else inner
            a = math.pi * k / 5.0 - math.pi / 2.0
            pts.append((cx + r * math.cos(a), cy + r * math.sin(a)))
        draw.polygon(pts, fill=fill)


def clutter_background(
    bg: np.ndarray, spec: ChallengeSpec, rng: np.random.Generator
) -> tuple[np.ndarray, list[ShapeSpec]]:
    """Scribble shapes over the backdrop, then open and salt it.

    Returns the cluttered field plus the drawn shape records (for audits).
    """
    w, h = spec.canvas
    arr = np.asarray(bg)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError("background must be RGB")
    if arr.shape[0] < h or arr.shape[1] < w:
        raise ValueError("background smaller than canvas")
    arr = arr[:h, :w]

    pil = Image.fromarray(arr.copy())
    draw = ImageDraw.Draw(pil, "RGBA")
    shapes: list[ShapeSpec] = []
    for kind in _SHAPE_KINDS:
        for _ in range(spec.shapes_per_kind):
            size = int(rng.integers(_SHAPE_SIZE_MIN, _SHAPE_SIZE_MAX + 1))
            x = int(rng.integers(0, w - size))
            y = int(rng.integers(0, h - size))
            shape = ShapeSpec(
                kind=kind,
                position=(x, y),
                size=size,
                color=tuple(int(c) for c in rng.integers(0, 256, 3)),
                opacity=float(rng.uniform(0.0, 1.0)),
            )
            shapes.append(shape)
            _draw_shape(draw, shape)

    out = np.asarray(pil, np.uint8)
    lo, hi = spec.open_radius_range
    radius = int(rng.integers(lo, hi + 1))
    out = imaging.morphological_open(out, radius)
    density = float(rng.uniform(*spec.noise_density_range))
    out = imaging.salt_pepper_noise(out, density, rng)
    return out, shapes


def extract_roi_mask(img: np.ndarray) -> np.ndarray:
    """Foreground silhouette by Otsu threshold on luminance.

    The object is assumed photographed against a near-uniform field; if the
    above-threshold side owns most of the border it is the background, so
    the mask flips.
    """
    gray = imaging.to_grayscale(img)
    _, bw = cv2.threshold(gray, 0, 255, cv2.THRESH_BINARY + cv2.THRESH_OTSU)
    border = np.concatenate([bw[0, :], bw[-1, :], bw[:, 0], bw[:, -1]])
    if (border > 0).mean() > 0.5:
        bw = 255 - bw
    return (bw > 0).astype(np.uint8)


def _crop_to_mask(
    img: np.ndarray, mask: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Trim an image and its silhouette to the silhouette's tight bbox."""
    ys, xs = np.nonzero(mask)
    if len(xs) == 0:
        raise LayoutFailure("empty hand silhouette")
    y0, y1 = int(ys.min()), int(ys.max()) + 1
    x0, x1 = int(xs.min()), int(xs.max()) + 1
    return img[y0:y1, x0:x1], mask[y0:y1, x0:x1]


def _fit_scale(
    crop_shape: tuple[int, int], size: int, angle: float,
    avail: tuple[int, int],
) -> tuple[int, int, int, int] | None:
    """Scale the crop so its long side is `size`, shrinking until the
    rotated frame fits the available box; None if even tiny sizes fail."""
    ch_, cw = crop_shape
    long_side = max(cw, ch_)
    while size >= 16:
        tw = max(round(cw * size / long_side), 1)
        th = max(round(ch_ * size / long_side), 1)
        bw, bh = imaging.rotated_bbox(tw, th, angle)
        if bw <= avail[0] and bh <= avail[1]:
            return tw, th, bw, bh
        size = int(size * min(avail[0] / bw, avail[1] / bh)) or 15
    return None


def place_hands(
    bg: np.ndarray,
    genuine: tuple[np.ndarray, np.ndarray],
    fakes: list[np.ndarray],
    layout: GridLayout,
    spec: ChallengeSpec,
    rng: np.random.Generator,
) -> tuple[np.ndarray, tuple[int, int], frozenset[int]]:
    """Composite each hand into its own random grid cell.

    Every hand gets an independent size draw from the configured range and
    an independent rotation; the silhouette's rotated bounding box is
    shrunk, if needed, until it sits inside the assigned cell with half the
    inter-image margin to spare, which keeps placements disjoint by
    construction.  Returns the composed canvas, the two genuine cells in
    placement order, and the full occupied set.
    """
    if not 5 <= len(fakes) <= 7:
        raise ValueError("fake count must lie in [5, 7]")
    n_hands = 2 + len(fakes)
    cells = [int(c) + 1 for c in rng.choice(9, size=n_hands, replace=False)]
    margin = max(spec.spacing // 2, 1)

    canvas = np.asarray(bg).copy()
    hands = list(genuine) + list(fakes)
    for hand, cell in zip(hands, cells):
        mask = extract_roi_mask(hand)
        crop, crop_mask = _crop_to_mask(np.asarray(hand), mask)
        lo, hi = spec.hand_size_range
        size = int(rng.integers(lo, hi + 1))
        angle = float(rng.uniform(-spec.rotation_range, spec.rotation_range))

        x0, y0, x1, y1 = layout.cell_rect(cell)
        avail = ((x1 - x0) - 2 * margin, (y1 - y0) - 2 * margin)
        fit = _fit_scale(crop_mask.shape, size, angle, avail)
        if fit is None:
            raise LayoutFailure("hand does not fit its cell after shrinking")
        tw, th, bw, bh = fit
        ox = x0 + margin + int(rng.integers(0, avail[0] - bw + 1))
        oy = y0 + margin + int(rng.integers(0, avail[1] - bh + 1))
        canvas = imaging.composite_transform(
            crop, (tw, th), angle, (ox, oy), canvas,
            roi=crop_mask, resample=spec.resample,
        )

    truth = (cells[0], cells[1])
    return canvas, truth, frozenset(cells)


def generate_challenge(
    stores: dict[str, ImageStore], spec: ChallengeSpec, seed: int
) -> Challenge:
    """Run the full pipeline for one seed.

    `stores` maps 'background', 'genuine', 'fake' to their stores.  The seed
    alone fixes every random draw, so regeneration reproduces the image and
    truth bit for bit.  Placement retries consume further draws from the
    same stream and therefore stay deterministic.
    """
    for role in ("background", "genuine", "fake"):
        if role not in stores or len(stores[role]) == 0:
            raise ValueError(f"store {role!r} is missing or empty")

    rng = make_rng(seed)
    layout = GridLayout(canvas=spec.canvas)
    last_err: Exception | None = None
    for _ in range(max(spec.retry_budget, 1)):
        bg_label = str(rng.choice(stores["background"].labels))
        bg = stores["background"].load(bg_label)[0]
        if bg.shape[0] != spec.canvas[1] or bg.shape[1] != spec.canvas[0]:
            bg = cv2.resize(bg, spec.canvas, interpolation=cv2.INTER_LINEAR)
        cluttered, _ = clutter_background(bg, spec, rng)
        kept_field = cluttered.copy()

        g_class = str(rng.choice(stores["genuine"].labels))
        g_pair = stores["genuine"].load(g_class)
        n_fake = spec.n_fake or int(rng.integers(5, 8))
        f_labels = [
            str(l) for l in rng.choice(
                stores["fake"].labels, size=n_fake, replace=False
            )
        ]
        fake_imgs = [stores["fake"].load(l)[0] for l in f_labels]

        try:
            composed, truth, occupied = place_hands(
                cluttered, (g_pair[0], g_pair[1]), fake_imgs, layout, spec, rng
            )
        except LayoutFailure as err:
            last_err = err
            continue

        blended = imaging.alpha_blend(composed, kept_field, spec.alpha)
        final = imaging.gamma_correct(blended, spec.gamma)
        return Challenge(
            image=final,
            truth=truth,
            genuine_class=g_class,
            occupied_cells=occupied,
            created_at=time.time(),
            spec=spec,
            seed=seed,
            fake_labels=tuple(f_labels),
            background_label=bg_label,
        )
    raise LayoutFailure(f"layout failed after {spec.retry_budget} attempts: {last_err}")


def verify_solution(
    ch: Challenge, answer: tuple[int, int], elapsed: float
) -> SolutionResult:
    """Grade a submitted cell pair against the hidden truth.

    Order does not matter.  Late answers are never graded: past the time
    limit the claimant is flagged as a probable bot regardless of content.
    """
    try:
        a, b = int(answer[0]), int(answer[1])
    except (TypeError, ValueError, IndexError):
        return SolutionResult("reject", "malformed")
    if not (1 <= a <= 9 and 1 <= b <= 9):
        return SolutionResult("reject", "malformed")
    if elapsed > TIME_LIMIT_SECONDS:
        return SolutionResult("timeout", "time limit exceeded")
    if a == b:
        return SolutionResult("reject", "cells must differ")
    if {a, b} == set(ch.truth):
        return SolutionResult("accept", None)
    return SolutionResult("reject", "wrong cells")


def entropy_gap_report(ch: Challenge, stores: dict[str, ImageStore]) -> dict:
    """Entropy diagnostics: how alike the embedded images are.

    Reports the |H| gap between the two genuine photos, the mean cyclic
    pairwise |H| gap across the decoys, and the conditional entropy of the
    challenge given each constituent (constituents resized to the canvas to
    pair pixels positionally).
    """
    g_pair = stores["genuine"].load(ch.genuine_class)
    h_g = [imaging.entropy(imaging.to_grayscale(g)) for g in g_pair]
    intra_genuine = abs(h_g[0] - h_g[1])

    fakes = [stores["fake"].load(l)[0] for l in ch.fake_labels]
    h_f = [imaging.entropy(imaging.to_grayscale(f)) for f in fakes]
    gaps = [abs(h_f[i] - h_f[(i + 1) % len(h_f)]) for i in range(len(h_f))]
    inter_fake = float(np.mean(gaps)) if gaps else 0.0

    ch_gray = imaging.to_grayscale(ch.image)
    cond = []
    for img in g_pair + fakes:
        resized = cv2.resize(img, ch.spec.canvas, interpolation=cv2.INTER_LINEAR)
        cond.append(imaging.conditional_entropy(ch_gray, imaging.to_grayscale(resized)))
    return {
        "intra_genuine_entropy_gap": intra_genuine,
        "inter_fake_entropy_gap": inter_fake,
        "conditional_entropies": cond,
        "conditional_entropy_mean": float(np.mean(cond)) if cond else 0.0,
    }


def save_challenge(ch: Challenge, out_dir) -> tuple[Path, Path]:
    """Write the PNG plus the client-safe JSON sidecar; truth stays out."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    png = out / f"{ch.id}.png"
    sidecar = out / f"{ch.id}.json"
    imaging.save_png(png, ch.image)
    sidecar.write_text(json.dumps(ch.client_payload(), indent=2))
    return png, sidecar


def load_challenge(png_path) -> tuple[np.ndarray, dict]:
    """Read back a saved challenge image and its sidecar payload."""
    png = Path(png_path)
    sidecar = png.with_suffix(".json")
    return imaging.load_png(png), json.loads(sidecar.read_text())
