// Top-down 2-D canvas renderer.  Camera follows the driven car; the truck is
// drawn opaque and the oncoming car stays hidden until the line of sight
// clears it, mirroring the driver's blocked view.

import { Snapshot } from "./protocol.js";
import { rectAround, segmentIntersectsRect } from "./los.js";
import { HudState } from "./hud.js";

const SCALE = 6; // px per meter
const ROAD_WIDTH_M = 20;
const LANE_LINE_Y = 10;
const CAR_WIDTH_M = 1.8;
const TRUCK_WIDTH_M = 2.5;

export function vtcVisible(snap: Snapshot): boolean {
  const truck = rectAround(
    snap.truck.x,
    snap.truck.y,
    snap.truck.length,
    TRUCK_WIDTH_M,
  );
  return !segmentIntersectsRect(
    snap.voi.x,
    snap.voi.y,
    snap.vtc.x,
    snap.vtc.y,
    truck,
  );
}

export class Renderer {
  private ctx: CanvasRenderingContext2D;
  private canvas: HTMLCanvasElement;

  constructor(canvas: HTMLCanvasElement) {
    this.canvas = canvas;
    const ctx = canvas.getContext("2d");
    if (!ctx) throw new Error("2d canvas unavailable");
    this.ctx = ctx;
  }

  draw(snap: Snapshot | null, hud: HudState): void {
    const { ctx, canvas } = this;
    ctx.fillStyle = "#202a20";
    ctx.fillRect(0, 0, canvas.width, canvas.height);
    if (snap !== null) {
      this.drawWorld(snap);
    }
    this.drawHud(hud);
  }

  private worldToScreen(snap: Snapshot, x: number, y: number): [number, number] {
    // camera keeps the driven car a third of the way across the canvas
    const camX = snap.voi.x - this.canvas.width / (3 * SCALE);
    return [(x - camX) * SCALE, this.canvas.height / 2 + (LANE_LINE_Y - y) * SCALE];
  }

  private drawWorld(snap: Snapshot): void {
    const { ctx, canvas } = this;
    const [, roadTop] = this.worldToScreen(snap, 0, ROAD_WIDTH_M);
    const [, roadBottom] = this.worldToScreen(snap, 0, 0);
    ctx.fillStyle = "#3c3c3c";
    ctx.fillRect(0, roadTop, canvas.width, roadBottom - roadTop);

    ctx.strokeStyle = "#e8d44d";
    ctx.setLineDash([14, 10]);
    ctx.lineWidth = 2;
    const [, centerY] = this.worldToScreen(snap, 0, LANE_LINE_Y);
    ctx.beginPath();
    ctx.moveTo(0, centerY);
    ctx.lineTo(canvas.width, centerY);
    ctx.stroke();
    ctx.setLineDash([]);

    this.drawVehicle(snap, snap.truck.x, snap.truck.y, snap.truck.length,
                     TRUCK_WIDTH_M, "#111111");
    if (vtcVisible(snap)) {
      this.drawVehicle(snap, snap.vtc.x, snap.vtc.y, snap.vtc.length,
                       CAR_WIDTH_M, "#c03030");
    }
    this.drawVehicle(snap, snap.voi.x, snap.voi.y, snap.voi.length,
                     CAR_WIDTH_M, "#3367d6");
  }

  private drawVehicle(snap: Snapshot, x: number, y: number, length: number,
                      width: number, color: string): void {
    const { ctx } = this;
    const [sx, sy] = this.worldToScreen(snap, x, y);
    ctx.fillStyle = color;
    ctx.fillRect(sx - (length / 2) * SCALE, sy - (width / 2) * SCALE,
                 length * SCALE, width * SCALE);
  }

  private drawHud(hud: HudState): void {
    const { ctx, canvas } = this;
    ctx.font = "16px system-ui, sans-serif";
    ctx.fillStyle = "#ffffff";
    ctx.fillText(`${hud.speedKmh} km/h`, 12, 24);
    ctx.fillText(`BSM age: ${hud.bsmAgeText}`, 12, 46);

    if (hud.warningVisible) {
      ctx.fillStyle = "#d62b2b";
      ctx.fillRect(canvas.width / 2 - 130, 12, 260, 40);
      ctx.fillStyle = "#ffffff";
      ctx.font = "bold 20px system-ui, sans-serif";
      ctx.fillText("DO NOT PASS", canvas.width / 2 - 70, 39);
    }
    if (hud.outcomeText) {
      ctx.fillStyle = "rgba(0,0,0,0.75)";
      ctx.fillRect(canvas.width / 2 - 220, canvas.height / 2 - 32, 440, 64);
      ctx.fillStyle = "#ffd23e";
      ctx.font = "bold 22px system-ui, sans-serif";
      ctx.fillText(hud.outcomeText, canvas.width / 2 - 200, canvas.height / 2 + 8);
    }
    if (hud.connectionBanner) {
      ctx.fillStyle = "#cccccc";
      ctx.fillText(hud.connectionBanner, canvas.width / 2 - 50, canvas.height / 2);
    }
  }
}
