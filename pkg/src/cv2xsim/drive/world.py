"""Do-not-pass world: kinematics, BSM exchange over the sidelink engine,
warning logic, and near-crash detection.

The driven car (VoI) follows a slower trailer truck on a two-lane road; an
oncoming car (VtC) approaches in the other lane.  The truck body blocks line
of sight between VoI and VtC exactly as it blocks the driver's view, pushing
the link onto the NLOS budget; within that budget their periodic safety
messages still get through, which is what the do-not-pass warning feeds on.
A warning is active iff a fresh VtC message was received (age <= 300 ms) and
the predicted paths conflict (oncoming, closing, within the horizon).

A near-crash is an episode that demanded a rapid evasive maneuver: the
time-to-collision dropped below 1.5 s while the VoI occupied the oncoming
lane, or braking reached 4.9 m/s^2 (half g) with the cars closer than 30 m.
Overlapping bodies are a crash.  Exactly one of {no-incident, near-crash,
crash} terminates an episode.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from ..channel import RadioConfig
from ..engine import Engine
from ..geometry import Lane, Rect, Road, SpaceSpec
from ..mobility import DensityConfig, MobilityConfig, TRUCK_LENGTH_M, TRUCK_WIDTH_M
from ..scenario import EngineConfig, Scenario, SchedConfig, TrafficConfig

CAR_LENGTH_M = 4.5
CAR_WIDTH_M = 1.8

OUTCOME_NONE = "no-incident"
OUTCOME_NEAR_CRASH = "near-crash"
OUTCOME_CRASH = "crash"


@dataclass(frozen=True)
class DriveConfig:
    road_length_m: float = 520.0
    road_width_m: float = 20.0
    lane_own_y: float = 8.0    # eastbound lane center (VoI, truck)
    lane_opp_y: float = 12.0   # westbound lane center (VtC)
    voi_start_x: float = 40.0
    voi_desired_mps: float = 14.0
    voi_pass_mps: float = 20.0
    accel_max_mps2: float = 3.0
    brake_max_mps2: float = 8.0
    lateral_mps: float = 3.0
    truck_speed_mps: float = 11.0
    truck_gap_m: tuple[float, float] = (18.0, 30.0)
    vtc_gap_m: tuple[float, float] = (95.0, 125.0)
    vtc_speed_mps: tuple[float, float] = (12.0, 16.0)
    ttc_threshold_s: float = 1.5
    evasive_decel_mps2: float = 4.9
    near_gap_m: float = 30.0
    warn_fresh_ms: int = 300
    conflict_horizon_s: float = 12.0
    bsm_period_ms: int = 100
    timeout_ms: int = 60_000


@dataclass(frozen=True)
class ControlInput:
    t_ms: int
    steer: float = 0.0    # [-1, 1]; positive steers toward the oncoming lane
    throttle: float = 0.0  # [0, 1]
    brake: float = 0.0     # [0, 1]

    def __post_init__(self) -> None:
        if not (-1.0 <= self.steer <= 1.0 and 0.0 <= self.throttle <= 1.0
                and 0.0 <= self.brake <= 1.0):
            raise ValueError("control input out of range")


NEUTRAL = ControlInput(0)


@dataclass
class Kin:
    x: float
    y: float
    speed: float
    direction: int  # +1 east, -1 west


@dataclass(frozen=True)
class TickRecord:
    t_ms: int
    voi_x: float
    voi_y: float
    voi_speed: float
    voi_decel: float
    steer: float
    vtc_x: float
    vtc_speed: float
    truck_x: float
    warning: bool
    bsm_age_ms: int | None
    gap_m: float
    ttc_s: float
    in_opposite_lane: bool


@dataclass(frozen=True)
class NearCrashEvent:
    t_ms: int
    min_gap_m: float
    trigger: str  # "ttc-breach" | "evasive-braking" | "evasive-steering"
    peak_decel_mps2: float


@dataclass(frozen=True)
class EpisodeResult:
    outcome: str
    event: NearCrashEvent | None
    duration_ms: int
    seed: int
    policy: str
    bsm_enabled: bool


def rects_overlap(a: Rect, b: Rect) -> bool:
    return not (a.x_max < b.x_min or b.x_max < a.x_min
                or a.y_max < b.y_min or b.y_max < a.y_min)


def body_rect(k: Kin, length: float, width: float) -> Rect:
    return Rect.centered(k.x, k.y, length, width)


def detect_near_crash(history: Iterable[TickRecord],
                      cfg: DriveConfig = DriveConfig()) -> NearCrashEvent | None:
    """Scan an episode's tick history for the first near-crash condition."""
    min_gap = math.inf
    peak_decel = 0.0
    hit: tuple[int, str] | None = None
    for rec in history:
        min_gap = min(min_gap, rec.gap_m)
        peak_decel = max(peak_decel, rec.voi_decel)
        if hit is None:
            if rec.in_opposite_lane and rec.ttc_s < cfg.ttc_threshold_s:
                trigger = "evasive-steering" if abs(rec.steer) > 0.5 else "ttc-breach"
                hit = (rec.t_ms, trigger)
            elif rec.voi_decel >= cfg.evasive_decel_mps2 and rec.gap_m < cfg.near_gap_m:
                hit = (rec.t_ms, "evasive-braking")
    if hit is None:
        return None
    return NearCrashEvent(t_ms=hit[0], min_gap_m=min_gap, trigger=hit[1],
                          peak_decel_mps2=peak_decel)


def _drive_scenario(cfg: DriveConfig, radio: RadioConfig) -> Scenario:
    space = SpaceSpec(cfg.road_length_m, cfg.road_width_m)
    mid = cfg.road_width_m / 2
    road = Road("drive", "horizontal", mid, (
        Lane("drive-east", cfg.lane_own_y - mid, 1),
        Lane("drive-west", cfg.lane_opp_y - mid, -1),
    ))
    return Scenario(
        space=space, roads=(road,), rsus=(), obstacles=(),
        density=DensityConfig(1, 1),  # one car per lane + the truck
        mobility=MobilityConfig(tick_ms=20),
        radio=radio,
        traffic=TrafficConfig(rsu_classes=(), vehicle_class="BSM-critical",
                              period_ms=cfg.bsm_period_ms,
                              record_vehicle_samples=True),
        sched=SchedConfig(),
        engine=EngineConfig(warmup_ms=0, default_duration_ms=cfg.timeout_ms),
    )


class DriveSession:
    """One episode: owns the drive world and the embedded sidelink engine."""

    def __init__(self, seed: int, cfg: DriveConfig | None = None,
                 bsm_enabled: bool = True, radio: RadioConfig | None = None):
        self.cfg = cfg or DriveConfig()
        self.seed = seed
        self.bsm_enabled = bsm_enabled
        rng = np.random.default_rng([seed, 77])
        c = self.cfg
        truck_gap = float(rng.uniform(*c.truck_gap_m))
        vtc_gap = float(rng.uniform(*c.vtc_gap_m))
        vtc_speed = float(rng.uniform(*c.vtc_speed_mps))

        self.voi = Kin(c.voi_start_x, c.lane_own_y, c.voi_desired_mps, 1)
        self.truck = Kin(c.voi_start_x + truck_gap, c.lane_own_y, c.truck_speed_mps, 1)
        self.vtc = Kin(c.voi_start_x + vtc_gap, c.lane_opp_y, vtc_speed, -1)

        self.time_ms = 0
        self.warning = False
        self.outcome: str | None = None  # set when the episode ends
        self.done = False
        self.history: list[TickRecord] = []
        self._last_rx: dict[tuple[str, str], int] = {}
        self._prev_speed = self.voi.speed
        self._last_steer = 0.0

        self.engine: Engine | None = None
        self.voi_id = "veh-0000"
        self.vtc_id = "veh-0001"
        self.truck_id = "veh-0002"
        if bsm_enabled:
            sc = _drive_scenario(c, radio or RadioConfig())
            self.engine = Engine(sc, seed, duration_ms=c.timeout_ms,
                                 position_provider=self._positions,
                                 reception_hook=self._on_reception)
            kinds = [v.kind for v in self.engine.vehicles]
            assert kinds == ["car", "car", "truck"], kinds

    # engine feed ------------------------------------------------------

    def _positions(self, clock_ms: int):
        pos = np.array([[self.voi.x, self.voi.y],
                        [self.vtc.x, self.vtc.y],
                        [self.truck.x, self.truck.y]])
        rect = body_rect(self.truck, TRUCK_LENGTH_M, TRUCK_WIDTH_M)
        return pos, rect.as_array().reshape(1, 4), np.array([2], dtype=np.int64)

    def _on_reception(self, msg_id, cls_name, source_id, gen_ms, rx_ms, receivers):
        for dst in receivers:
            self._last_rx[(source_id, dst)] = rx_ms

    @property
    def bsm_age_ms(self) -> int | None:
        """Age of the last VtC safety message the VoI decoded."""
        rx = self._last_rx.get((self.vtc_id, self.voi_id))
        return None if rx is None else self.time_ms - rx

    # dynamics ---------------------------------------------------------

    def _conflict_predicted(self) -> bool:
        if self.vtc.x <= self.voi.x:
            return False  # already met or passed
        closing = self.voi.speed + self.vtc.speed
        if closing <= 0:
            return False
        return (self.vtc.x - self.voi.x) / closing <= self.cfg.conflict_horizon_s

    def step(self, control: ControlInput, dt_s: float) -> None:
        """Advance the episode by one tick (dt in (0, 0.1] seconds)."""
        if not (0.0 < dt_s <= 0.1):
            raise ValueError("dt must be in (0, 0.1] s")
        if self.done:
            return
        c = self.cfg
        dt_ms = max(1, round(dt_s * 1000))

        # sidelink first: radio for [t, t+dt) sees positions at time t
        if self.engine is not None:
            self.engine.advance(self.time_ms + dt_ms)

        accel = control.throttle * c.accel_max_mps2 - control.brake * c.brake_max_mps2
        new_speed = min(max(self.voi.speed + accel * dt_s, 0.0), 30.0)
        decel = max(0.0, (self.voi.speed - new_speed) / dt_s)
        self.voi.speed = new_speed
        self.voi.x += self.voi.speed * dt_s
        self.voi.y = min(max(self.voi.y + control.steer * c.lateral_mps * dt_s,
                             c.lane_own_y - 2.0), c.lane_opp_y + 2.0)
        self.truck.x += self.truck.speed * dt_s
        self.vtc.x -= self.vtc.speed * dt_s

        self.time_ms += dt_ms
        self._last_steer = control.steer

        age = self.bsm_age_ms
        fresh = age is not None and age <= c.warn_fresh_ms
        self.warning = bool(fresh and self._conflict_predicted())

        gap = abs(self.vtc.x - self.voi.x)
        closing = self.voi.speed + self.vtc.speed
        ttc = (self.vtc.x - self.voi.x) / closing \
            if (self.vtc.x > self.voi.x and closing > 0) else math.inf
        in_opp = self.voi.y >= (c.lane_own_y + c.lane_opp_y) / 2
        self.history.append(TickRecord(
            t_ms=self.time_ms, voi_x=self.voi.x, voi_y=self.voi.y,
            voi_speed=self.voi.speed, voi_decel=decel, steer=control.steer,
            vtc_x=self.vtc.x, vtc_speed=self.vtc.speed, truck_x=self.truck.x,
            warning=self.warning, bsm_age_ms=age, gap_m=gap, ttc_s=ttc,
            in_opposite_lane=in_opp))

        voi_body = body_rect(self.voi, CAR_LENGTH_M, CAR_WIDTH_M)
        if (rects_overlap(voi_body, body_rect(self.vtc, CAR_LENGTH_M, CAR_WIDTH_M))
                or rects_overlap(voi_body, body_rect(self.truck, TRUCK_LENGTH_M,
                                                     TRUCK_WIDTH_M))):
            self._finish(OUTCOME_CRASH)
            return
        pass_complete = (self.voi.x > self.truck.x + TRUCK_LENGTH_M / 2 + 10.0
                         and abs(self.voi.y - c.lane_own_y) < 0.5)
        if pass_complete or self.time_ms >= c.timeout_ms:
            event = detect_near_crash(self.history, c)
            self._finish(OUTCOME_NEAR_CRASH if event else OUTCOME_NONE)

    def _finish(self, outcome: str) -> None:
        self.outcome = outcome
        self.done = True

    def result(self, policy: str = "external") -> EpisodeResult:
        outcome = self.outcome
        if outcome is None:
            event = detect_near_crash(self.history, self.cfg)
            outcome = OUTCOME_NEAR_CRASH if event else OUTCOME_NONE
        return EpisodeResult(
            outcome=outcome,
            event=detect_near_crash(self.history, self.cfg),
            duration_ms=self.time_ms,
            seed=self.seed,
            policy=policy,
            bsm_enabled=self.bsm_enabled,
        )


def run_episode(policy: str, seed: int, bsm_enabled: bool = True,
                cfg: DriveConfig | None = None, dt_s: float = 0.02,
                record_controls: bool = False):
    """Headless episode under a scripted autopilot.

    Returns (EpisodeResult, controls) where controls is the input trace when
    requested (for bridge replay), else None.
    """
    from .autopilot import Autopilot

    session = DriveSession(seed, cfg=cfg, bsm_enabled=bsm_enabled)
    pilot = Autopilot(policy, session.cfg)
    controls: list[ControlInput] | None = [] if record_controls else None
    while not session.done:
        control = pilot.control(session)
        if controls is not None:
            controls.append(control)
        session.step(control, dt_s)
    return session.result(policy), controls
