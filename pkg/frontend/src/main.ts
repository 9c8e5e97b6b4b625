// Browser entry: connect, pump keyboard input at 30 Hz, render every
// animation frame from the latest server snapshot.

import { NetClient, INPUT_SEND_HZ } from "./net.js";
import { attachKeyboard, controlsFromKeys, newInputState } from "./input.js";
import { hudState } from "./hud.js";
import { Renderer } from "./render.js";

function serverUrl(): string {
  const params = new URLSearchParams(window.location.search);
  const host = params.get("host") ?? "127.0.0.1";
  const port = params.get("port") ?? "8700";
  return `ws://${host}:${port}/`;
}

function start(): void {
  const canvas = document.getElementById("view") as HTMLCanvasElement;
  const renderer = new Renderer(canvas);
  const net = new NetClient(serverUrl());
  const input = newInputState();
  attachKeyboard(input, window);
  net.connect();

  const t0 = performance.now();
  setInterval(() => {
    if (input.restartRequested) {
      input.restartRequested = false;
      net.sendRestart();
    }
    net.sendInput(controlsFromKeys(input.keys, performance.now() - t0));
  }, 1000 / INPUT_SEND_HZ);

  const frame = () => {
    renderer.draw(net.latestSnapshot(), hudState(net.latestSnapshot(), net.connected));
    requestAnimationFrame(frame);
  };
  requestAnimationFrame(frame);
}

window.addEventListener("load", start);
