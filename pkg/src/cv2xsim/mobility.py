"""Vehicle placement and motion.

Placement conditions the homogeneous PPP on fixed counts: exactly
``lambda`` cars per lane and ``theta`` trucks per road, each positioned
independently and uniformly along its lane, so the population (and with it
the contention level) stays constant for the whole run.  Motion is constant
speed along the lane with wrap-around at the road end.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .geometry import (
    Obstacle,
    Rect,
    Road,
    Rsu,
    SpaceSpec,
    TRUCK_LENGTH_M,
    TRUCK_WIDTH_M,
)


@dataclass(frozen=True)
class DensityConfig:
    lambda_per_lane: int = 5
    trucks_per_road: int = 1

    def __post_init__(self) -> None:
        if self.lambda_per_lane < 0 or self.trucks_per_road < 0:
            raise ValueError("densities must be non-negative")


@dataclass(frozen=True)
class MobilityConfig:
    car_speed_mps: float = 14.0
    truck_speed_mps: float = 11.0
    tick_ms: int = 100

    def __post_init__(self) -> None:
        if self.tick_ms <= 0:
            raise ValueError("mobility tick must be positive")
        if self.car_speed_mps < 0 or self.truck_speed_mps < 0:
            raise ValueError("speeds must be non-negative")


@dataclass(frozen=True)
class VehicleState:
    id: str
    road_id: str
    lane_id: str
    position_m: float  # longitudinal, in the lane's travel direction
    speed_mps: float
    kind: str  # "car" | "truck"
    rsu_id: str | None = None


def place_vehicles(
    roads: Sequence[Road],
    space: SpaceSpec,
    density: DensityConfig,
    mobility: MobilityConfig,
    rng: np.random.Generator,
) -> list[VehicleState]:
    """Fixed-count uniform placement; deterministic given the rng state.

    Cars are drawn lane by lane in road order, then trucks road by road on a
    uniformly chosen lane, so the rng consumption order (and thus the layout
    for a given seed) is stable.
    """
    vehicles: list[VehicleState] = []
    idx = 0
    for road in roads:
        length = road.lane_length(space)
        for lane in road.lanes:
            positions = rng.uniform(0.0, length, size=density.lambda_per_lane)
            for pos in positions:
                vehicles.append(VehicleState(
                    id=f"veh-{idx:04d}",
                    road_id=road.id,
                    lane_id=lane.id,
                    position_m=float(pos),
                    speed_mps=mobility.car_speed_mps,
                    kind="car",
                ))
                idx += 1
    for road in roads:
        length = road.lane_length(space)
        for _ in range(density.trucks_per_road):
            lane = road.lanes[int(rng.integers(0, len(road.lanes)))]
            pos = float(rng.uniform(0.0, length))
            vehicles.append(VehicleState(
                id=f"veh-{idx:04d}",
                road_id=road.id,
                lane_id=lane.id,
                position_m=pos,
                speed_mps=mobility.truck_speed_mps,
                kind="truck",
            ))
            idx += 1
    return vehicles


def step(
    vehicles: Sequence[VehicleState],
    roads_by_id: dict[str, Road],
    space: SpaceSpec,
    dt_s: float,
) -> list[VehicleState]:
    """Advance every vehicle by speed*dt along its lane, modulo lane length."""
    if dt_s <= 0:
        raise ValueError("dt must be positive")
    out = []
    for v in vehicles:
        length = roads_by_id[v.road_id].lane_length(space)
        new_pos = (v.position_m + v.speed_mps * dt_s) % length
        out.append(replace(v, position_m=new_pos))
    return out


def world_positions(
    vehicles: Sequence[VehicleState],
    roads_by_id: dict[str, Road],
    space: SpaceSpec,
) -> np.ndarray:
    """(n, 2) world coordinates of all vehicles."""
    pts = np.empty((len(vehicles), 2))
    for i, v in enumerate(vehicles):
        road = roads_by_id[v.road_id]
        lane = next(l for l in road.lanes if l.id == v.lane_id)
        pts[i] = road.lane_point(lane, v.position_m, space)
    return pts


def truck_body(
    vehicle: VehicleState, roads_by_id: dict[str, Road], space: SpaceSpec
) -> Obstacle:
    """Lane-aligned body rectangle of a truck, centered on its antenna point."""
    road = roads_by_id[vehicle.road_id]
    lane = next(l for l in road.lanes if l.id == vehicle.lane_id)
    cx, cy = road.lane_point(lane, vehicle.position_m, space)
    if road.axis == "horizontal":
        rect = Rect.centered(cx, cy, TRUCK_LENGTH_M, TRUCK_WIDTH_M)
    else:
        rect = Rect.centered(cx, cy, TRUCK_WIDTH_M, TRUCK_LENGTH_M)
    return Obstacle(id=f"{vehicle.id}-body", kind="truck", rect=rect, owner_id=vehicle.id)


def associate_nearest_rsu(points: np.ndarray, rsus: Sequence[Rsu]) -> np.ndarray:
    """Index of the nearest RSU per point (ties to the lower index).

    Coverage is not required: vehicles outside every RSU's range still attach
    to the nearest one and simply fail reception.  Returns -1s when no RSUs
    exist (single shared channel).
    """
    if len(rsus) == 0 or len(points) == 0:
        return np.full(len(points), -1, dtype=np.int64)
    centers = np.array([r.position for r in rsus])
    d2 = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    return np.argmin(d2, axis=1)
