"""Closed-form attack calculators for the hand-challenge stage.

Every function here is a small exact formula: the chance of clearing a
challenge by clicking random regions (rectangular and circular target
models), the brute-force bot false-accept bound, the chained probability of
an online guessing attack that must get hand type, geometry, and grid cells
all right, the relative cost of segmenting a cluttered canvas, and the
wall-clock estimate for an exhaustive geometry search.

The search-space constant follows the source arithmetic literally: the
10^3 term is the hand-type count 2*N_G (two hands per class), which also
appears as the denominator of the type-guess factor p_G.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, asdict

__all__ = [
    "SecurityReport",
    "rect_guess_probability",
    "circ_guess_probability",
    "equivalent_radius",
    "bot_far",
    "online_guess_probability",
    "segmentation_complexity_ratio",
    "search_time_estimate",
    "recognizability_gap",
    "build_security_report",
]


def rect_guess_probability(
    s_hc: tuple[int, int], s_g: tuple[int, int]
) -> float:
    """Chance of two random rectangular hits both landing on target regions.

    p = [2mn / (XY)] * [mn / (XY - mn)] for canvas (X, Y) and target (m, n):
    the first pick may hit either genuine region, the second must hit the
    remaining one inside the leftover area.
    """
    x, y = s_hc
    m, n = s_g
    if x <= 0 or y <= 0 or m < 0 or n < 0:
        raise ValueError("dimensions must be positive (target may be zero)")
    area = x * y
    target = m * n
    if target == 0:
        return 0.0
    if target >= area:
        raise ValueError("degenerate geometry: target not smaller than canvas")
    return (2.0 * target / area) * (target / (area - target))


def equivalent_radius(s_g: tuple[int, int]) -> float:
    """Radius of the circle whose area equals the m x n rectangle."""
    m, n = s_g
    return math.sqrt(m * n / math.pi)


def circ_guess_probability(s_hc: tuple[int, int], r: float) -> float:
    """Circular-target variant: p3 * p4 with p3 = 2*pi*r^2/(XY)."""
    x, y = s_hc
    if x <= 0 or y <= 0 or r < 0:
        raise ValueError("dimensions must be positive (radius may be zero)")
    if r == 0:
        return 0.0
    area = x * y
    disk = math.pi * r * r
    if disk >= area:
        raise ValueError("degenerate geometry: disk not smaller than canvas")
    p3 = 2.0 * disk / area
    p4 = disk / (area - disk)
    return p3 * p4


def bot_far(n_t: int, q: int) -> float:
    """Brute-force false accept rate (1/n_T)^q for q picks over n_T cells."""
    if n_t < 1 or q < 1:
        raise ValueError("n_T and q must be at least 1")
    return (1.0 / n_t) ** q


def online_guess_probability(
    n_g: int,
    dim_gap: int,
    pixel_fraction: float = 1.0,
    grid_slots: int = 9,
    picks: int = 2,
) -> tuple[float, float, float, float]:
    """Factorized success chance of an online guessing bot.

    Returns (p_G, p_S, p_L, p_T):
      p_G  chance of naming the right hand type out of 2*N_G,
      p_S  chance of matching the unknown scale in both placements; the
           full-knowledge case is (1/dim_gap^2)^2 and knowing only a
           fraction of pixels shrinks the per-axis gap to fraction*dim_gap,
      p_L  chance of hitting the right ordered cell pair, 1/P(slots, picks),
      p_T  the product.
    """
    if n_g < 1 or dim_gap < 1:
        raise ValueError("N_G and dim_gap must be at least 1")
    if not 0.0 < pixel_fraction <= 1.0:
        raise ValueError("pixel_fraction must lie in (0, 1]")
    p_g = 1.0 / (2.0 * n_g)
    p_s = 1.0 / (pixel_fraction * dim_gap) ** 4
    p_s = min(p_s, 1.0)
    p_l = 1.0 / math.perm(grid_slots, picks)
    return p_g, p_s, p_l, p_g * p_s * p_l


def segmentation_complexity_ratio(n1: int, n2: int, beta: float) -> float:
    """How much harder segmenting n1 objects is than n2, at base beta."""
    if beta <= 1.0:
        raise ValueError("beta must exceed 1")
    return beta ** (n1 - n2)


def search_time_estimate(
    n_g: int, dim_gap: int, grid_perms: int, per_pixel_cost: float
) -> float:
    """Seconds to sweep the full geometry search space.

    Space = (2*N_G) * (dim_gap^2)^2 * grid_perms candidate configurations,
    each costing per_pixel_cost seconds.
    """
    if n_g < 1 or dim_gap < 1 or grid_perms < 1 or per_pixel_cost < 0:
        raise ValueError("all inputs must be positive (cost may be zero)")
    space = (2.0 * n_g) * float(dim_gap**2) ** 2 * grid_perms
    return space * per_pixel_cost


def recognizability_gap(p_human: float, p_machine: float) -> float:
    """Diagnostic gap between measured human and machine solve rates."""
    return p_human - p_machine


@dataclass
class SecurityReport:
    """Bundle of attack estimates for one generator configuration."""

    canvas: tuple[int, int]
    target: tuple[int, int]
    p_rect: float
    p_circ: float
    equivalent_radius: float
    far_bot: float
    p_g: float
    p_s: float
    p_l: float
    p_total_online: float
    complexity_ratio: float
    search_time_seconds: float
    p_human: float | None = None
    p_machine: float | None = None
    recognizability_gap: float | None = None
    entropy_diagnostics: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        for name in ("p_rect", "p_circ", "far_bot", "p_g", "p_s", "p_l",
                     "p_total_online"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} out of [0, 1]: {v}")

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(asdict(self), indent=indent)


def build_security_report(
    canvas: tuple[int, int] = (460, 460),
    target: tuple[int, int] = (100, 100),
    n_cells: int = 9,
    picks: int = 2,
    n_g: int = 500,
    dim_gap: int = 51,
    pixel_fraction: float = 1.0,
    clutter_objects: int = 9,
    plain_objects: int = 6,
    beta: float = 2.0,
    per_pixel_cost: float = 1e-9,
    p_human: float | None = None,
    entropy_diagnostics: dict | None = None,
) -> SecurityReport:
    """Evaluate every calculator at one configuration and bundle the results."""
    r = equivalent_radius(target)
    p_g, p_s, p_l, p_t = online_guess_probability(
        n_g, dim_gap, pixel_fraction, n_cells, picks
    )
    far = bot_far(n_cells, picks)
    gap = None if p_human is None else recognizability_gap(p_human, far)
    return SecurityReport(
        canvas=canvas,
        target=target,
        p_rect=rect_guess_probability(canvas, target),
        p_circ=circ_guess_probability(canvas, r),
        equivalent_radius=r,
        far_bot=far,
        p_g=p_g,
        p_s=p_s,
        p_l=p_l,
        p_total_online=p_t,
        complexity_ratio=segmentation_complexity_ratio(
            clutter_objects, plain_objects, beta
        ),
        search_time_seconds=search_time_estimate(
            n_g, dim_gap, math.perm(n_cells, picks), per_pixel_cost
        ),
        p_human=p_human,
        p_machine=None if p_human is None else far,
        recognizability_gap=gap,
        entropy_diagnostics=entropy_diagnostics or {},
    )
