// HUD state is a pure projection of the latest snapshot plus connection
// status: no client-side prediction, the banner shows exactly what the
// server says.

import { Snapshot } from "./protocol.js";

export interface HudState {
  warningVisible: boolean;
  speedKmh: number;
  bsmAgeText: string;
  outcomeText: string | null;
  connectionBanner: string | null;
}

const OUTCOME_TEXT: Record<string, string | null> = {
  none: null,
  near_crash: "NEAR CRASH - press R to restart",
  crash: "CRASH - press R to restart",
};

export function hudState(snapshot: Snapshot | null, connected: boolean): HudState {
  if (!connected) {
    return {
      warningVisible: false,
      speedKmh: 0,
      bsmAgeText: "-",
      outcomeText: null,
      connectionBanner: "reconnecting...",
    };
  }
  if (snapshot === null) {
    return {
      warningVisible: false,
      speedKmh: 0,
      bsmAgeText: "-",
      outcomeText: null,
      connectionBanner: null,
    };
  }
  return {
    warningVisible: snapshot.warning,
    speedKmh: Math.round(snapshot.voi.speed * 3.6),
    bsmAgeText:
      snapshot.bsm_age_ms === null ? "no link" : `${snapshot.bsm_age_ms} ms`,
    outcomeText: OUTCOME_TEXT[snapshot.outcome] ?? null,
    connectionBanner: null,
  };
}
