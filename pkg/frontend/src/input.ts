// Keyboard state -> control input mapping.  The pure mapping is separated
// from the DOM wiring so every reachable key combination can be tested.

import { InputFrame, makeInputFrame } from "./protocol.js";

export const STEER_KEYS_UP = new Set(["ArrowUp", "KeyW"]);
export const STEER_KEYS_DOWN = new Set(["ArrowDown", "KeyS"]);
export const STEER_KEYS_LEFT = new Set(["ArrowLeft", "KeyA"]);
export const STEER_KEYS_RIGHT = new Set(["ArrowRight", "KeyD"]);

export interface InputState {
  keys: Set<string>;
  restartRequested: boolean;
}

export function newInputState(): InputState {
  return { keys: new Set(), restartRequested: false };
}

// Up/W = throttle, Down/S = brake.  Left/A steers toward the oncoming lane
// (screen-up), Right/D back toward the own lane.
export function controlsFromKeys(keys: Set<string>, t: number): InputFrame {
  let steer = 0;
  const left = [...STEER_KEYS_LEFT].some((k) => keys.has(k));
  const right = [...STEER_KEYS_RIGHT].some((k) => keys.has(k));
  if (left && !right) steer = 1;
  if (right && !left) steer = -1;
  const throttle = [...STEER_KEYS_UP].some((k) => keys.has(k)) ? 1 : 0;
  const brake = [...STEER_KEYS_DOWN].some((k) => keys.has(k)) ? 1 : 0;
  return makeInputFrame(t, steer, throttle, brake);
}

export function attachKeyboard(state: InputState, target: {
  addEventListener(type: string, cb: (ev: KeyboardEvent) => void): void;
}): void {
  target.addEventListener("keydown", (ev) => {
    if (ev.code === "KeyR") {
      state.restartRequested = true;
      return;
    }
    state.keys.add(ev.code);
  });
  target.addEventListener("keyup", (ev) => {
    state.keys.delete(ev.code);
  });
}
