"""Scripted drivers for headless episodes.

pass-blind commits to the overtake as soon as the truck holds it below its
desired speed, ignoring everything it cannot see.  pass-with-warnings holds
half a second for the link to settle, initiates only while no do-not-pass
warning is active, and aborts (returns to its lane, braking gently, never
harder than 3 m/s^2) the moment one appears.
"""
from __future__ import annotations

from .world import ControlInput, DriveConfig, DriveSession

PASS_BLIND = "pass-blind"
PASS_WITH_WARNINGS = "pass-with-warnings"

FOLLOW_GAP_M = 22.0
TRIGGER_GAP_M = 45.0
CLEAR_AHEAD_M = 12.0
ABORT_BRAKE_MPS2 = 3.0
INITIAL_HOLD_S = 0.5


class Autopilot:
    def __init__(self, policy: str, cfg: DriveConfig | None = None,
                 initial_hold_s: float = INITIAL_HOLD_S):
        if policy not in (PASS_BLIND, PASS_WITH_WARNINGS):
            raise ValueError(f"unknown policy {policy!r}")
        self.policy = policy
        self.cfg = cfg or DriveConfig()
        self.hold_ms = int(initial_hold_s * 1000)
        self.state = "follow"

    def control(self, session: DriveSession) -> ControlInput:
        c = self.cfg
        voi, truck = session.voi, session.truck
        gap_t = truck.x - voi.x
        target_y = c.lane_own_y
        target_v = c.voi_desired_mps
        brake_cap = c.brake_max_mps2

        if self.state == "follow":
            if gap_t > 0 and gap_t < 35.0:
                target_v = min(c.voi_desired_mps,
                               truck.speed + 0.3 * (gap_t - FOLLOW_GAP_M))
            wants_pass = (session.time_ms >= self.hold_ms and 0 < gap_t < TRIGGER_GAP_M
                          and truck.speed < c.voi_desired_mps)
            allowed = self.policy == PASS_BLIND or not session.warning
            if wants_pass and allowed:
                self.state = "pass"

        if self.state == "pass":
            if self.policy == PASS_WITH_WARNINGS and session.warning:
                self.state = "abort"
            elif voi.x > truck.x + CLEAR_AHEAD_M:
                self.state = "return"
            else:
                target_y = c.lane_opp_y
                target_v = c.voi_pass_mps

        if self.state == "abort":
            target_y = c.lane_own_y
            target_v = min(truck.speed - 1.0, voi.speed)
            brake_cap = ABORT_BRAKE_MPS2
            if abs(voi.y - c.lane_own_y) < 0.3 and gap_t > 8.0:
                self.state = "follow"

        if self.state == "return":
            target_y = c.lane_own_y
            target_v = c.voi_desired_mps
            if abs(voi.y - c.lane_own_y) < 0.3:
                self.state = "follow"

        a_des = max(min((target_v - voi.speed) / 0.5, c.accel_max_mps2), -brake_cap)
        steer = max(min((target_y - voi.y) / 1.0, 1.0), -1.0)
        throttle = a_des / c.accel_max_mps2 if a_des > 0 else 0.0
        brake = -a_des / c.brake_max_mps2 if a_des < 0 else 0.0
        return ControlInput(t_ms=session.time_ms, steer=steer,
                            throttle=min(throttle, 1.0), brake=min(brake, 1.0))
