// Browser entry point: wire the gateway client, keyboard capture and the
// render loop together. The gateway URL defaults to the page host on port
// 8765 and can be overridden with ?gateway=ws://host:port.

import { CommandSender, InputTracker, stickToHeadingIdx } from "./input.js";
import { ConsoleModel } from "./model.js";
import { GatewayClient } from "./net.js";
import { CommandFrame } from "./protocol.js";
import { ConsoleView, ViewElements } from "./view.js";

function gatewayUrl(): string {
  const param = new URLSearchParams(window.location.search).get("gateway");
  if (param) return param;
  const host = window.location.hostname || "127.0.0.1";
  return `ws://${host}:8765`;
}

function grab(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el;
}

function start(): void {
  const elements: ViewElements = {
    topCanvas: grab("topdown") as HTMLCanvasElement,
    sideCanvas: grab("sideview") as HTMLCanvasElement,
    status: grab("status"),
    linkBox: grab("linkbox"),
    missionBox: grab("missionbox"),
    feedBox: grab("feedbox"),
    commandBox: grab("commandbox"),
  };

  const model = new ConsoleModel();
  const view = new ConsoleView(elements);
  const tracker = new InputTracker();
  let connected = false;
  let lastSent: CommandFrame | null = null;

  const client = new GatewayClient(
    gatewayUrl(),
    (frame, wallMs) => model.apply(frame, wallMs),
    (up) => {
      connected = up;
      if (!up) tracker.clear(); // buffered intent is dropped on disconnect
    },
  );
  client.start();

  const sender = new CommandSender(tracker, (frame) => {
    if (model.scenario && model.scenario.pilot_mode !== "external") return;
    if (client.send(frame)) lastSent = frame;
  });
  sender.start();

  window.addEventListener("keydown", (ev) => {
    if (ev.code.startsWith("Arrow")) ev.preventDefault();
    tracker.keydown(ev.code, ev.shiftKey);
  });
  window.addEventListener("keyup", (ev) => tracker.keyup(ev.code, ev.shiftKey));
  window.addEventListener("blur", () => tracker.clear());

  // optional gamepad: left stick aims and drives, like the direction keys
  function pollGamepad(): void {
    const pad = navigator.getGamepads?.()[0];
    if (!pad) return;
    const x = pad.axes[0] ?? 0;
    const y = pad.axes[1] ?? 0;
    const idx = stickToHeadingIdx(x, y);
    tracker.setStick(idx, Math.hypot(x, y) < 0.7);
  }

  function frame(): void {
    pollGamepad();
    view.render(model, lastSent, performance.now(), connected);
    requestAnimationFrame(frame);
  }
  requestAnimationFrame(frame);
}

window.addEventListener("load", start);
