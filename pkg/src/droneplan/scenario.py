"""Service region, subareas with user densities, and user-snapshot generation.

A scenario is one frozen snapshot of user positions over a rectangular region
tiled by rectangular subareas of uniform density. Subarea densities are set
from the realized user counts, so ``round(density * area)`` recovers the exact
per-subarea population.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ScenarioError


@dataclass(frozen=True)
class Region:
    """Axis-aligned service rectangle with origin at (0, 0). Meters."""

    width: float
    height: float

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("region dimensions must be positive")

    def diagonal(self):
        return math.hypot(self.width, self.height)

    def area(self):
        return self.width * self.height

    def contains(self, points):
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        return (
            (pts[:, 0] >= 0.0)
            & (pts[:, 0] <= self.width)
            & (pts[:, 1] >= 0.0)
            & (pts[:, 1] <= self.height)
        )


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle; membership is half-open ([x, x+w) except at the
    region's outer edge, which callers treat as closed via point generation)."""

    x: float
    y: float
    w: float
    h: float

    def area(self):
        return self.w * self.h

    def contains(self, points):
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        return (
            (pts[:, 0] >= self.x)
            & (pts[:, 0] < self.x + self.w)
            & (pts[:, 1] >= self.y)
            & (pts[:, 1] < self.y + self.h)
        )


@dataclass(frozen=True)
class Subarea:
    id: int
    rect: Rect
    density: float  # users / m^2

    def area(self):
        return self.rect.area()

    def demand(self):
        """Expected user count in this subarea."""
        return self.density * self.rect.area()


@dataclass(frozen=True)
class Scenario:
    region: Region
    subareas: tuple
    users: np.ndarray = field(repr=False)  # (n, 2) meters
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "users", np.asarray(self.users, dtype=float).reshape(-1, 2))
        object.__setattr__(self, "subareas", tuple(self.subareas))

    def n_users(self):
        return self.users.shape[0]

    def validate(self):
        """Check all scenario invariants; raises ScenarioError with a field path."""
        inside = self.region.contains(self.users)
        if not inside.all():
            bad = int(np.flatnonzero(~inside)[0])
            raise ScenarioError(f"users[{bad}]: position {self.users[bad].tolist()} outside region")
        if not _tiles_region(self.region, [s.rect for s in self.subareas]):
            raise ScenarioError("subareas: rectangles do not tile the region")
        for k, sub in enumerate(self.subareas):
            if sub.density < 0:
                raise ScenarioError(f"subareas[{k}].density: must be >= 0")
        total = sum(round(s.demand()) for s in self.subareas)
        if total != self.n_users():
            raise ScenarioError(
                f"subareas: rounded demand sum {total} != user count {self.n_users()}"
            )
        return self


def _tiles_region(region, rects, tol=1e-6):
    """True when the rectangles have disjoint interiors and cover the region."""
    area = sum(r.area() for r in rects)
    if abs(area - region.area()) > tol * region.area():
        return False
    for r in rects:
        if r.x < -tol or r.y < -tol:
            return False
        if r.x + r.w > region.width + tol or r.y + r.h > region.height + tol:
            return False
    for i, a in enumerate(rects):
        for b in rects[i + 1 :]:
            ox = min(a.x + a.w, b.x + b.w) - max(a.x, b.x)
            oy = min(a.y + a.h, b.y + b.h) - max(a.y, b.y)
            if ox > tol and oy > tol:
                return False
    return True


def _uniform_in_rect(rng, n, rect):
    xs = rng.uniform(rect.x, rect.x + rect.w, size=n)
    ys = rng.uniform(rect.y, rect.y + rect.h, size=n)
    return np.column_stack([xs, ys])


def _subareas_from_counts(rects, points):
    """Assign densities from realized per-rect counts so bookkeeping is exact."""
    subs = []
    for k, rect in enumerate(rects):
        count = int(rect.contains(points).sum())
        subs.append(Subarea(id=k, rect=rect, density=count / rect.area()))
    return tuple(subs)


def generate_scenario_one(n_users, region, split_fractions=(0.2, 0.8), seed=0):
    """Two equal-width halves with an uneven uniform user split.

    ``floor(f_left * n)`` users land uniformly in the left half, the rest in
    the right half.
    """
    f_left, f_right = split_fractions
    if not (0.0 <= f_left <= 1.0 and 0.0 <= f_right <= 1.0):
        raise ValueError("split fractions must lie in [0, 1]")
    if abs(f_left + f_right - 1.0) > 1e-9:
        raise ValueError("split fractions must sum to 1")
    if n_users <= 0:
        raise ValueError("n_users must be positive")

    rng = np.random.default_rng(seed)
    half_w = region.width / 2.0
    left = Rect(0.0, 0.0, half_w, region.height)
    right = Rect(half_w, 0.0, half_w, region.height)
    n_left = int(math.floor(f_left * n_users))
    pts = np.vstack(
        [
            _uniform_in_rect(rng, n_left, left),
            _uniform_in_rect(rng, n_users - n_left, right),
        ]
    )
    subs = _subareas_from_counts([left, right], pts)
    return Scenario(region=region, subareas=subs, users=pts, seed=seed).validate()


def generate_scenario_two(n_users, region, central_fraction=0.4, sigma=1000.0, seed=0):
    """Normally distributed central cluster plus a uniform background.

    The central subarea is the axis-aligned square of side ``4 * sigma``
    centered on the region, clipped to the region; normal draws falling
    outside it are redrawn so per-subarea counts stay exact. The remaining
    users are uniform over the rest of the region.
    """
    if not 0.0 <= central_fraction <= 1.0:
        raise ValueError("central_fraction must lie in [0, 1]")
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    if n_users <= 0:
        raise ValueError("n_users must be positive")

    rng = np.random.default_rng(seed)
    cx, cy = region.width / 2.0, region.height / 2.0
    x0, x1 = max(0.0, cx - 2.0 * sigma), min(region.width, cx + 2.0 * sigma)
    y0, y1 = max(0.0, cy - 2.0 * sigma), min(region.height, cy + 2.0 * sigma)
    central = Rect(x0, y0, x1 - x0, y1 - y0)

    # Ring of up to four rectangles tiling the remainder of the region.
    outer = [
        Rect(0.0, 0.0, x0, region.height),                            # left strip
        Rect(x1, 0.0, region.width - x1, region.height),              # right strip
        Rect(x0, 0.0, x1 - x0, y0),                                   # bottom middle
        Rect(x0, y1, x1 - x0, region.height - y1),                    # top middle
    ]
    outer = [r for r in outer if r.w > 0 and r.h > 0]

    n_central = int(round(central_fraction * n_users))
    central_pts = np.empty((0, 2))
    while central_pts.shape[0] < n_central:
        draw = rng.normal(loc=(cx, cy), scale=sigma, size=(max(n_central, 16), 2))
        keep = draw[central.contains(draw)]
        central_pts = np.vstack([central_pts, keep])
    central_pts = central_pts[:n_central]

    n_outer = n_users - n_central
    outer_pts = np.empty((0, 2))
    while outer_pts.shape[0] < n_outer:
        draw = _uniform_in_rect(rng, max(n_outer, 16), Rect(0, 0, region.width, region.height))
        keep = draw[~central.contains(draw)]
        outer_pts = np.vstack([outer_pts, keep])
    outer_pts = outer_pts[:n_outer]

    pts = np.vstack([central_pts, outer_pts])
    subs = _subareas_from_counts([central] + outer, pts)
    return Scenario(region=region, subareas=subs, users=pts, seed=seed).validate()


def save_scenario(scenario, path):
    doc = {
        "region": {"width": scenario.region.width, "height": scenario.region.height},
        "subareas": [
            {
                "id": s.id,
                "rect": {"x": s.rect.x, "y": s.rect.y, "w": s.rect.w, "h": s.rect.h},
                "density": s.density,
            }
            for s in scenario.subareas
        ],
        "users": scenario.users.tolist(),
        "seed": scenario.seed,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def load_scenario(path):
    """Load and fully validate a scenario file; see README for the schema."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: not valid JSON ({exc})") from exc

    def need(mapping, key, where):
        if key not in mapping:
            raise ScenarioError(f"{where}.{key}: missing")
        return mapping[key]

    reg = need(doc, "region", "scenario")
    try:
        region = Region(float(need(reg, "width", "region")), float(need(reg, "height", "region")))
    except ValueError as exc:
        raise ScenarioError(f"region: {exc}") from exc

    subs = []
    for k, raw in enumerate(need(doc, "subareas", "scenario")):
        rect = need(raw, "rect", f"subareas[{k}]")
        subs.append(
            Subarea(
                id=int(need(raw, "id", f"subareas[{k}]")),
                rect=Rect(
                    float(need(rect, "x", f"subareas[{k}].rect")),
                    float(need(rect, "y", f"subareas[{k}].rect")),
                    float(need(rect, "w", f"subareas[{k}].rect")),
                    float(need(rect, "h", f"subareas[{k}].rect")),
                ),
                density=float(need(raw, "density", f"subareas[{k}]")),
            )
        )
    users = np.asarray(need(doc, "users", "scenario"), dtype=float)
    if users.size and (users.ndim != 2 or users.shape[1] != 2):
        raise ScenarioError("users: expected an array of [x, y] pairs")
    scn = Scenario(region=region, subareas=tuple(subs), users=users, seed=int(doc.get("seed", 0)))
    return scn.validate()
