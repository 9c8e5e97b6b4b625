import { describe, expect, it } from "vitest";
import {
  isWellFormedInput,
  makeInputFrame,
  parseSnapshot,
} from "../src/protocol.js";

const SNAPSHOT = {
  tick: 42,
  voi: { x: 50, y: 8, speed: 14, length: 4.5 },
  vtc: { x: 160, y: 12, speed: 13, length: 4.5 },
  truck: { x: 75, y: 8, speed: 11, length: 16 },
  warning: true,
  outcome: "none",
  bsm_age_ms: 12,
};

describe("snapshot parsing", () => {
  it("accepts a valid snapshot", () => {
    const snap = parseSnapshot(JSON.stringify(SNAPSHOT));
    expect(snap).not.toBeNull();
    expect(snap!.tick).toBe(42);
    expect(snap!.warning).toBe(true);
    expect(snap!.bsm_age_ms).toBe(12);
  });

  it("accepts a null link age", () => {
    const snap = parseSnapshot(
      JSON.stringify({ ...SNAPSHOT, bsm_age_ms: null }),
    );
    expect(snap).not.toBeNull();
    expect(snap!.bsm_age_ms).toBeNull();
  });

  it("rejects malformed documents", () => {
    expect(parseSnapshot("nope")).toBeNull();
    expect(parseSnapshot("[1,2,3]")).toBeNull();
    expect(parseSnapshot(JSON.stringify({ ...SNAPSHOT, outcome: "boom" }))).toBeNull();
    expect(parseSnapshot(JSON.stringify({ ...SNAPSHOT, voi: { x: 1 } }))).toBeNull();
    const missing: Record<string, unknown> = { ...SNAPSHOT };
    delete missing.warning;
    expect(parseSnapshot(JSON.stringify(missing))).toBeNull();
  });
});

describe("input frames", () => {
  it("clamps out-of-range values", () => {
    const frame = makeInputFrame(100.4, 3, -1, 0.5);
    expect(frame.steer).toBe(1);
    expect(frame.throttle).toBe(0);
    expect(frame.brake).toBe(0.5);
    expect(frame.t).toBe(100);
    expect(isWellFormedInput(frame)).toBe(true);
  });

  it("is well formed for any numeric combination", () => {
    for (const steer of [-5, -1, -0.25, 0, 0.8, 1, 2]) {
      for (const throttle of [-1, 0, 0.5, 1, 9]) {
        for (const brake of [-0.5, 0, 1, 3]) {
          expect(
            isWellFormedInput(makeInputFrame(0, steer, throttle, brake)),
          ).toBe(true);
        }
      }
    }
  });
});
