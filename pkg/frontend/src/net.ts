// Thin websocket client: parse inbound frames, auto-reconnect, drop local
// input while disconnected (the gateway owns all truth; nothing is buffered).

import { CommandFrame, ServerFrame, parseServerFrame } from "./protocol.js";

export type FrameHandler = (frame: ServerFrame, wallMs: number) => void;

export class GatewayClient {
  private ws: WebSocket | null = null;
  private reconnectTimer: ReturnType<typeof setTimeout> | null = null;
  connected = false;

  constructor(
    private url: string,
    private onFrame: FrameHandler,
    private onStatus: (connected: boolean) => void = () => {},
  ) {}

  start(): void {
    this.open();
  }

  private open(): void {
    this.ws = new WebSocket(this.url);
    this.ws.addEventListener("open", () => {
      this.connected = true;
      this.onStatus(true);
    });
    this.ws.addEventListener("message", (ev: MessageEvent) => {
      const frame = parseServerFrame(String(ev.data));
      if (frame) this.onFrame(frame, performance.now());
    });
    this.ws.addEventListener("close", () => this.dropAndRetry());
    this.ws.addEventListener("error", () => this.ws?.close());
  }

  private dropAndRetry(): void {
    if (this.connected) this.onStatus(false);
    this.connected = false;
    this.ws = null;
    if (this.reconnectTimer === null) {
      this.reconnectTimer = setTimeout(() => {
        this.reconnectTimer = null;
        this.open();
      }, 1000);
    }
  }

  send(frame: CommandFrame): boolean {
    if (this.ws && this.ws.readyState === WebSocket.OPEN) {
      this.ws.send(JSON.stringify(frame));
      return true;
    }
    return false; // disconnected: input is discarded, never queued
  }
}
