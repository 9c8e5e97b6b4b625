"""Headless episode runner: `python -m cv2xsim.drive.headless --policy
pass-blind --seed 3` prints the episode result as JSON."""
from __future__ import annotations

import argparse
import json
import sys

from .autopilot import Autopilot, PASS_BLIND, PASS_WITH_WARNINGS
from .world import DriveSession, run_episode


def record_session(policy: str, seed: int, path: str, dt_s: float = 0.02) -> int:
    """Write the per-tick wire snapshots of one autopilot episode as JSONL."""
    from .bridge import snapshot_doc

    session = DriveSession(seed)
    pilot = Autopilot(policy, session.cfg)
    tick = 0
    with open(path, "w") as f:
        while not session.done:
            session.step(pilot.control(session), dt_s)
            tick += 1
            f.write(json.dumps(snapshot_doc(tick, session)) + "\n")
    return tick


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--policy", choices=[PASS_BLIND, PASS_WITH_WARNINGS],
                   default=PASS_BLIND)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-bsm", action="store_true", help="disable the safety link")
    p.add_argument("--dump-controls", action="store_true",
                   help="also emit the control trace (for bridge replay clients)")
    p.add_argument("--record-session", metavar="FILE",
                   help="write per-tick wire snapshots of the episode as JSONL")
    args = p.parse_args(argv)
    if args.record_session:
        ticks = record_session(args.policy, args.seed, args.record_session)
        print(json.dumps({"recorded_ticks": ticks, "path": args.record_session}))
        return 0
    result, controls = run_episode(args.policy, args.seed,
                                   bsm_enabled=not args.no_bsm,
                                   record_controls=args.dump_controls)
    doc = {
        "policy": result.policy,
        "seed": result.seed,
        "bsm_enabled": result.bsm_enabled,
        "outcome": result.outcome,
        "duration_ms": result.duration_ms,
        "near_crash": None if result.event is None else {
            "t_ms": result.event.t_ms,
            "trigger": result.event.trigger,
            "min_gap_m": result.event.min_gap_m,
            "peak_decel_mps2": result.event.peak_decel_mps2,
        },
    }
    if args.dump_controls:
        doc["controls"] = [
            {"t": c.t_ms, "steer": c.steer, "throttle": c.throttle, "brake": c.brake}
            for c in controls or []
        ]
    print(json.dumps(doc))
    return 0


if __name__ == "__main__":
    sys.exit(main())
