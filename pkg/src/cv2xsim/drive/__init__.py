"""The do-not-pass scenario: a two-lane road, a sight-blocking truck ahead
of the driven vehicle, and an oncoming car whose safety messages travel over
the simulated sidelink.  Headless episodes (scripted autopilot) and a
realtime WebSocket bridge for the browser client share the same world."""

from .world import (
    ControlInput,
    DriveConfig,
    DriveSession,
    EpisodeResult,
    NearCrashEvent,
    detect_near_crash,
    run_episode,
)
from .autopilot import Autopilot, PASS_BLIND, PASS_WITH_WARNINGS

__all__ = [
    "Autopilot",
    "ControlInput",
    "DriveConfig",
    "DriveSession",
    "EpisodeResult",
    "NearCrashEvent",
    "PASS_BLIND",
    "PASS_WITH_WARNINGS",
    "detect_near_crash",
    "run_episode",
]
