// Wire protocol shared with the drive bridge: every WebSocket text frame
// carries one JSON object.  The server is authoritative; the client only
// sends control inputs and renders snapshots.

export interface EntityState {
  x: number;
  y: number;
  speed: number;
  length: number;
}

export type Outcome = "none" | "near_crash" | "crash";

export interface Snapshot {
  tick: number;
  voi: EntityState;
  vtc: EntityState;
  truck: EntityState;
  warning: boolean;
  outcome: Outcome;
  bsm_age_ms: number | null;
}

export interface InputFrame {
  t: number;
  steer: number; // [-1, 1]
  throttle: number; // [0, 1]
  brake: number; // [0, 1]
}

export interface RestartFrame {
  cmd: "restart";
}

const clamp = (v: number, lo: number, hi: number) =>
  Math.min(hi, Math.max(lo, v));

export function makeInputFrame(
  t: number,
  steer: number,
  throttle: number,
  brake: number,
): InputFrame {
  return {
    t: Math.max(0, Math.round(t)),
    steer: clamp(steer, -1, 1),
    throttle: clamp(throttle, 0, 1),
    brake: clamp(brake, 0, 1),
  };
}

export function isWellFormedInput(frame: InputFrame): boolean {
  return (
    Number.isFinite(frame.t) &&
    frame.t >= 0 &&
    frame.steer >= -1 &&
    frame.steer <= 1 &&
    frame.throttle >= 0 &&
    frame.throttle <= 1 &&
    frame.brake >= 0 &&
    frame.brake <= 1
  );
}

function isEntity(v: unknown): v is EntityState {
  if (typeof v !== "object" || v === null) return false;
  const e = v as Record<string, unknown>;
  return (
    typeof e.x === "number" &&
    typeof e.y === "number" &&
    typeof e.speed === "number" &&
    typeof e.length === "number"
  );
}

export function parseSnapshot(text: string): Snapshot | null {
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch {
    return null;
  }
  if (typeof doc !== "object" || doc === null) return null;
  const d = doc as Record<string, unknown>;
  if (
    typeof d.tick !== "number" ||
    typeof d.warning !== "boolean" ||
    !isEntity(d.voi) ||
    !isEntity(d.vtc) ||
    !isEntity(d.truck)
  ) {
    return null;
  }
  if (d.outcome !== "none" && d.outcome !== "near_crash" && d.outcome !== "crash") {
    return null;
  }
  if (d.bsm_age_ms !== null && typeof d.bsm_age_ms !== "number") return null;
  return d as unknown as Snapshot;
}
