// Server connection: latest-snapshot slot decouples network receive from
// rendering, input frames go out on a fixed timer (~30 Hz, within the
// bridge's accepted 20-60 Hz window).

import { InputFrame, parseSnapshot, Snapshot } from "./protocol.js";

export const INPUT_SEND_HZ = 30;

export class NetClient {
  private ws: WebSocket | null = null;
  private latest: Snapshot | null = null;
  private connectedFlag = false;
  private url: string;
  private reconnectTimer: ReturnType<typeof setTimeout> | null = null;

  constructor(url: string) {
    this.url = url;
  }

  connect(): void {
    this.ws = new WebSocket(this.url);
    this.ws.onopen = () => {
      this.connectedFlag = true;
    };
    this.ws.onmessage = (ev: MessageEvent) => {
      const snap = parseSnapshot(String(ev.data));
      if (snap !== null) this.latest = snap;
    };
    this.ws.onclose = () => {
      this.connectedFlag = false;
      this.latest = null;
      this.reconnectTimer = setTimeout(() => this.connect(), 1000);
    };
    this.ws.onerror = () => {
      this.ws?.close();
    };
  }

  get connected(): boolean {
    return this.connectedFlag;
  }

  latestSnapshot(): Snapshot | null {
    return this.latest;
  }

  sendInput(frame: InputFrame): void {
    if (this.connectedFlag && this.ws?.readyState === WebSocket.OPEN) {
      this.ws.send(JSON.stringify(frame));
    }
  }

  sendRestart(): void {
    if (this.connectedFlag && this.ws?.readyState === WebSocket.OPEN) {
      this.ws.send(JSON.stringify({ cmd: "restart" }));
    }
  }

  close(): void {
    if (this.reconnectTimer !== null) clearTimeout(this.reconnectTimer);
    this.ws?.close();
  }
}
