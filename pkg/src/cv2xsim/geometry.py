"""Planar scene model: simulation space, roads and lanes, RSUs, rectangular
obstacles, and line-of-sight blockage queries.

All coordinates are meters. The space is the axis-aligned box
[0, width_m] x [0, height_m]; roads are axis-aligned, so every obstacle
(building or lane-aligned truck body) is an axis-aligned rectangle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

Point = tuple[float, float]

LANE_WIDTH_M = 4.0
TRUCK_LENGTH_M = 16.0
TRUCK_WIDTH_M = 2.5


@dataclass(frozen=True)
class SpaceSpec:
    """East-west by north-south extent of the simulated area."""

    width_m: float
    height_m: float

    def __post_init__(self) -> None:
        if self.width_m <= 0 or self.height_m <= 0:
            raise ValueError("space dimensions must be positive")

    def contains(self, p: Point) -> bool:
        return 0.0 <= p[0] <= self.width_m and 0.0 <= p[1] <= self.height_m


@dataclass(frozen=True)
class Rect:
    """Closed axis-aligned rectangle."""

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self) -> None:
        if self.x_max <= self.x_min or self.y_max <= self.y_min:
            raise ValueError("rectangle must have positive area")

    @classmethod
    def centered(cls, cx: float, cy: float, size_x: float, size_y: float) -> "Rect":
        return cls(cx - size_x / 2, cy - size_y / 2, cx + size_x / 2, cy + size_y / 2)

    @property
    def center(self) -> Point:
        return ((self.x_min + self.x_max) / 2, (self.y_min + self.y_max) / 2)

    def contains_point(self, p: Point) -> bool:
        return self.x_min <= p[0] <= self.x_max and self.y_min <= p[1] <= self.y_max

    def as_array(self) -> np.ndarray:
        return np.array([self.x_min, self.y_min, self.x_max, self.y_max])


@dataclass(frozen=True)
class Lane:
    """One travel lane of a road.

    ``offset_m`` is the signed lateral offset of the lane center from the road
    centerline.  ``direction`` is +1 for travel in the +axis direction
    (east / north) and -1 for the opposite.  Longitudinal positions are
    measured from the lane's own start, i.e. they increase in the travel
    direction regardless of axis orientation.
    """

    id: str
    offset_m: float
    direction: int

    def __post_init__(self) -> None:
        if self.direction not in (-1, 1):
            raise ValueError("lane direction must be +1 or -1")


@dataclass(frozen=True)
class Road:
    id: str
    axis: str  # "horizontal" | "vertical"
    centerline_m: float
    lanes: tuple[Lane, ...]

    def __post_init__(self) -> None:
        if self.axis not in ("horizontal", "vertical"):
            raise ValueError(f"road {self.id}: axis must be horizontal or vertical")
        if len(self.lanes) < 1:
            raise ValueError(f"road {self.id}: needs at least one lane")

    def lane_length(self, space: SpaceSpec) -> float:
        return space.width_m if self.axis == "horizontal" else space.height_m

    def lane_point(self, lane: Lane, pos_m: float, space: SpaceSpec) -> Point:
        """World coordinates of longitudinal position ``pos_m`` on ``lane``."""
        length = self.lane_length(space)
        along = pos_m if lane.direction == 1 else length - pos_m
        lateral = self.centerline_m + lane.offset_m
        if self.axis == "horizontal":
            return (along, lateral)
        return (lateral, along)

    def lane_heading(self, lane: Lane) -> Point:
        if self.axis == "horizontal":
            return (float(lane.direction), 0.0)
        return (0.0, float(lane.direction))


@dataclass(frozen=True)
class Rsu:
    id: str
    position: Point
    range_m: float = 150.0
    channel: int = 0

    def __post_init__(self) -> None:
        if self.range_m <= 0:
            raise ValueError(f"RSU {self.id}: range must be positive")


@dataclass(frozen=True)
class Obstacle:
    """A LOS blocker: a static building or a moving truck body.

    For truck bodies ``owner_id`` names the vehicle whose body this is, so the
    truck's own transmissions/receptions can ignore it.
    """

    id: str
    kind: str  # "building" | "truck"
    rect: Rect
    owner_id: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("building", "truck"):
            raise ValueError(f"obstacle {self.id}: unknown kind {self.kind!r}")


def segment_intersects_rect(p1: Point, p2: Point, rect: Rect) -> bool:
    """True iff the closed segment [p1, p2] meets the closed rectangle.

    Liang-Barsky slab clipping; touching the boundary counts as intersecting.
    """
    if p1 == p2:
        raise ValueError("degenerate zero-length segment")
    t0, t1 = 0.0, 1.0
    dx = p2[0] - p1[0]
    dy = p2[1] - p1[1]
    for delta, lo, hi, start in (
        (dx, rect.x_min, rect.x_max, p1[0]),
        (dy, rect.y_min, rect.y_max, p1[1]),
    ):
        if delta == 0.0:
            if start < lo or start > hi:
                return False
        else:
            ta = (lo - start) / delta
            tb = (hi - start) / delta
            if ta > tb:
                ta, tb = tb, ta
            t0 = max(t0, ta)
            t1 = min(t1, tb)
            if t0 > t1:
                return False
    return True


def los_blocked(
    tx: Point,
    rx: Point,
    obstacles: Iterable[Obstacle],
    exclude_owner_ids: Sequence[str] = (),
) -> bool:
    """True iff any obstacle rectangle crosses the segment tx-rx.

    Obstacles owned by an id in ``exclude_owner_ids`` (the endpoints' own
    truck bodies) are skipped.  Coincident endpoints are trivially unblocked.
    """
    if tx == rx:
        return False
    for obs in obstacles:
        if obs.owner_id is not None and obs.owner_id in exclude_owner_ids:
            continue
        if segment_intersects_rect(tx, rx, obs.rect):
            return True
    return False


def in_range(rsu: Rsu, p: Point) -> bool:
    """Inclusive range test: distance(rsu, p) <= rsu.range_m."""
    return math.dist(rsu.position, p) <= rsu.range_m


def segments_blocked_mask(
    p1: np.ndarray, p2: np.ndarray, rects: np.ndarray, rect_owner_ok: np.ndarray | None = None
) -> np.ndarray:
    """Vectorized blockage test for n segments against m rectangles.

    p1, p2: (n, 2) endpoints; rects: (m, 4) as [x_min, y_min, x_max, y_max].
    rect_owner_ok: optional (n, m) boolean, False where rectangle j must be
    ignored for segment i (own truck body).  Returns an (n,) boolean mask.
    Zero-length segments are reported unblocked.
    """
    n = p1.shape[0]
    if n == 0 or rects.shape[0] == 0:
        return np.zeros(n, dtype=bool)
    d = p2 - p1
    degenerate = np.all(d == 0.0, axis=1)
    blocked = np.zeros(n, dtype=bool)
    for j in range(rects.shape[0]):
        x_min, y_min, x_max, y_max = rects[j]
        t0 = np.zeros(n)
        t1 = np.ones(n)
        ok = np.ones(n, dtype=bool)
        for k, lo, hi in ((0, x_min, x_max), (1, y_min, y_max)):
            delta = d[:, k]
            start = p1[:, k]
            par = delta == 0.0
            ok &= ~(par & ((start < lo) | (start > hi)))
            with np.errstate(divide="ignore", invalid="ignore"):
                ta = (lo - start) / delta
                tb = (hi - start) / delta
            swap = ta > tb
            ta2 = np.where(swap, tb, ta)
            tb2 = np.where(swap, ta, tb)
            t0 = np.where(par, t0, np.maximum(t0, ta2))
            t1 = np.where(par, t1, np.minimum(t1, tb2))
        hit = ok & (t0 <= t1)
        if rect_owner_ok is not None:
            hit &= rect_owner_ok[:, j]
        blocked |= hit
    return blocked & ~degenerate
