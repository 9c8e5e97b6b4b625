import { describe, expect, it } from "vitest";
import { rectAround, segmentIntersectsRect } from "../src/los.js";
import { vtcVisible } from "../src/render.js";
import { Snapshot } from "../src/protocol.js";

describe("segment vs rectangle", () => {
  const square = rectAround(5, 0, 2, 2);

  it("hits a rectangle straddling the segment", () => {
    expect(segmentIntersectsRect(0, 0, 10, 0, square)).toBe(true);
  });

  it("misses a disjoint rectangle", () => {
    expect(segmentIntersectsRect(0, 0, 10, 0, rectAround(5, 10, 2, 2))).toBe(false);
  });

  it("counts a touching boundary", () => {
    expect(segmentIntersectsRect(-5, 1, 5, 1, rectAround(0, 0, 2, 2))).toBe(true);
  });
});

function snap(voiY: number, vtcX: number): Snapshot {
  return {
    tick: 1,
    voi: { x: 40, y: voiY, speed: 14, length: 4.5 },
    vtc: { x: vtcX, y: 12, speed: 13, length: 4.5 },
    truck: { x: 65, y: 8, speed: 11, length: 16 },
    warning: false,
    outcome: "none",
    bsm_age_ms: null,
  };
}

describe("oncoming car visibility", () => {
  it("is hidden while the truck blocks the view", () => {
    expect(vtcVisible(snap(8, 150))).toBe(false);
  });

  it("appears once the driver pulls out", () => {
    expect(vtcVisible(snap(12, 150))).toBe(true);
  });
});
