// Scripted node client, same wire protocol as the browser: replays a control
// trace against a live bridge and reports the episode outcome.  Used by the
// protocol-conformance test and handy for manual checks:
//   node dist/headless.js ws://127.0.0.1:8700 controls.json

import { readFileSync } from "node:fs";
import WebSocket from "ws";
import { InputFrame, Outcome, parseSnapshot, Snapshot } from "./protocol.js";

export interface SessionLogEntry {
  snapshot: Snapshot;
}

export interface SessionResult {
  outcome: Outcome;
  frames: Snapshot[];
}

export function replaySession(
  url: string,
  controls: InputFrame[],
  dtMs = 20,
  graceMs = 2500,
): Promise<SessionResult> {
  return new Promise((resolve, reject) => {
    const ws = new WebSocket(url);
    const frames: Snapshot[] = [];
    let outcome: Outcome = "none";
    let idx = 0;
    let sender: ReturnType<typeof setInterval> | null = null;
    let graceTimer: ReturnType<typeof setTimeout> | null = null;

    const finish = () => {
      if (sender) clearInterval(sender);
      if (graceTimer) clearTimeout(graceTimer);
      ws.close();
      resolve({ outcome, frames });
    };

    ws.on("error", (err) => reject(err));
    ws.on("open", () => {
      sender = setInterval(() => {
        if (idx < controls.length) {
          ws.send(JSON.stringify(controls[idx]));
          idx += 1;
        } else if (graceTimer === null) {
          // hold the last input; give the trailing outcome a grace window
          graceTimer = setTimeout(finish, graceMs);
        }
      }, dtMs);
    });
    ws.on("message", (data) => {
      const snap = parseSnapshot(data.toString());
      if (snap === null) return;
      frames.push(snap);
      if (snap.outcome !== "none" && outcome === "none") {
        outcome = snap.outcome;
        finish();
      }
    });
  });
}

async function main(): Promise<void> {
  const url = process.argv[2] ?? "ws://127.0.0.1:8700";
  const controlsPath = process.argv[3];
  if (!controlsPath) {
    console.error("usage: headless.js <ws-url> <controls.json>");
    process.exit(2);
  }
  const controls = JSON.parse(readFileSync(controlsPath, "utf-8")) as InputFrame[];
  const result = await replaySession(url, controls);
  console.log(JSON.stringify({ outcome: result.outcome, frames: result.frames.length }));
}

const isDirectRun = process.argv[1]?.endsWith("headless.js") ?? false;
if (isDirectRun) {
  main().catch((err) => {
    console.error(err);
    process.exit(1);
  });
}
