import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { dirname, join } from "node:path";
import { describe, expect, it } from "vitest";
import { hudState } from "../src/hud.js";
import { parseSnapshot } from "../src/protocol.js";

const here = dirname(fileURLToPath(import.meta.url));
const fixture = join(here, "..", "fixtures", "session.jsonl");

describe("HUD projection", () => {
  it("shows the banner iff the snapshot says warning, on every recorded frame", () => {
    const lines = readFileSync(fixture, "utf-8").trim().split("\n");
    expect(lines.length).toBeGreaterThan(50);
    let warnings = 0;
    for (const line of lines) {
      const snap = parseSnapshot(line);
      expect(snap).not.toBeNull();
      const hud = hudState(snap!, true);
      expect(hud.warningVisible).toBe(snap!.warning);
      if (snap!.warning) warnings += 1;
    }
    expect(warnings).toBeGreaterThan(0); // the recorded episode raised warnings
  });

  it("reports speed in km/h and the link age", () => {
    const snap = parseSnapshot(
      JSON.stringify({
        tick: 1,
        voi: { x: 0, y: 8, speed: 10, length: 4.5 },
        vtc: { x: 100, y: 12, speed: 13, length: 4.5 },
        truck: { x: 30, y: 8, speed: 11, length: 16 },
        warning: false,
        outcome: "none",
        bsm_age_ms: 55,
      }),
    )!;
    const hud = hudState(snap, true);
    expect(hud.speedKmh).toBe(36);
    expect(hud.bsmAgeText).toBe("55 ms");
    expect(hud.outcomeText).toBeNull();
  });

  it("surfaces outcomes and disconnects", () => {
    const base = {
      tick: 1,
      voi: { x: 0, y: 8, speed: 10, length: 4.5 },
      vtc: { x: 100, y: 12, speed: 13, length: 4.5 },
      truck: { x: 30, y: 8, speed: 11, length: 16 },
      warning: false,
      bsm_age_ms: null,
    };
    const crash = parseSnapshot(JSON.stringify({ ...base, outcome: "crash" }))!;
    expect(hudState(crash, true).outcomeText).toContain("CRASH");
    expect(hudState(crash, false).connectionBanner).toBe("reconnecting...");
    expect(hudState(null, true).warningVisible).toBe(false);
  });
});
