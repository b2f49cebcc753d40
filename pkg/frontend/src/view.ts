// Canvas + DOM rendering. Top-down and side-elevation pool views (the
// course needs both: planar U-turns and depth changes), a depth gauge, the
// slot countdown, the mission panel and the event feed.

import { ConsoleModel } from "./model.js";
import { CommandFrame, ScenarioGate, headingDeg } from "./protocol.js";

const COLOR_BG = "#10161d";
const COLOR_POOL = "#1c2a38";
const COLOR_GRID = "#27405a";
const COLOR_VEHICLE = "#ffd54a";
const COLOR_SET = "#7fd0ff";
const COLOR_PASSED = "#51c169";
const COLOR_ACTIVE = "#ff9a3d";
const COLOR_PENDING = "#8a97a5";

export interface ViewElements {
  topCanvas: HTMLCanvasElement;
  sideCanvas: HTMLCanvasElement;
  status: HTMLElement;
  linkBox: HTMLElement;
  missionBox: HTMLElement;
  feedBox: HTMLElement;
  commandBox: HTMLElement;
}

export class ConsoleView {
  constructor(private el: ViewElements) {}

  render(model: ConsoleModel, lastSent: CommandFrame | null, wallMs: number,
         connected: boolean): void {
    this.drawTop(model);
    this.drawSide(model);
    this.renderStatus(model, wallMs, connected);
    this.renderLink(model, wallMs);
    this.renderMission(model);
    this.renderFeed(model);
    this.renderCommand(lastSent);
  }

  private poolTransform(canvas: HTMLCanvasElement, poolX: number, poolY: number) {
    const margin = 24;
    const sx = (canvas.width - 2 * margin) / poolX;
    const sy = (canvas.height - 2 * margin) / poolY;
    const s = Math.min(sx, sy);
    return {
      s,
      toPx: (x: number, y: number): [number, number] =>
        [margin + x * s, canvas.height - margin - y * s], // north up
    };
  }

  private drawTop(model: ConsoleModel): void {
    const canvas = this.el.topCanvas;
    const ctx = canvas.getContext("2d")!;
    ctx.fillStyle = COLOR_BG;
    ctx.fillRect(0, 0, canvas.width, canvas.height);
    if (!model.scenario) return;
    const [poolX, poolY] = model.scenario.pool;
    const { s, toPx } = this.poolTransform(canvas, poolX, poolY);

    const [ox, oy] = toPx(0, poolY);
    ctx.fillStyle = COLOR_POOL;
    ctx.fillRect(ox, oy, poolX * s, poolY * s);
    ctx.strokeStyle = COLOR_GRID;
    ctx.lineWidth = 1;
    for (let gx = 0; gx <= poolX; gx += 2) {
      line(ctx, toPx(gx, 0), toPx(gx, poolY));
    }
    for (let gy = 0; gy <= poolY; gy += 2) {
      line(ctx, toPx(0, gy), toPx(poolX, gy));
    }

    const active = model.activeGate();
    for (const g of model.orderedGates()) {
      const passed = model.gatePanel().find((r) => r.id === g.id)?.passed;
      ctx.strokeStyle = passed ? COLOR_PASSED : g === active ? COLOR_ACTIVE : COLOR_PENDING;
      ctx.fillStyle = ctx.strokeStyle;
      ctx.lineWidth = 3;
      const [cx, cy] = g.center;
      const [nx, ny] = g.normal;
      const half = gateHalfWidth(g);
      // aperture segment lies perpendicular to the required crossing direction
      const a = toPx(cx - half * -ny, cy - half * nx);
      const b = toPx(cx + half * -ny, cy + half * nx);
      line(ctx, a, b);
      arrow(ctx, toPx(cx, cy), toPx(cx + 0.45 * nx, cy + 0.45 * ny));
      const [lx, ly] = toPx(cx + 0.35 * -ny, cy + 0.3 * nx);
      ctx.font = "12px system-ui";
      ctx.fillText(String(g.id), lx, ly);
    }

    const t = model.telemetry;
    if (t) {
      // commanded heading ray, then the vehicle triangle on top
      const from = toPx(t.x, t.y);
      const hs = t.heading_set;
      ctx.strokeStyle = COLOR_SET;
      ctx.setLineDash([4, 4]);
      line(ctx, from, toPx(t.x + Math.sin(hs) * 1.2, t.y + Math.cos(hs) * 1.2));
      ctx.setLineDash([]);
      drawVehicle(ctx, from, t.psi, s);
    }
  }

  private drawSide(model: ConsoleModel): void {
    const canvas = this.el.sideCanvas;
    const ctx = canvas.getContext("2d")!;
    ctx.fillStyle = COLOR_BG;
    ctx.fillRect(0, 0, canvas.width, canvas.height);
    if (!model.scenario) return;
    const [poolX, , poolZ] = model.scenario.pool;
    const margin = 24;
    const sx = (canvas.width - 2 * margin) / poolX;
    const sz = (canvas.height - 2 * margin) / poolZ;
    const toPx = (x: number, z: number): [number, number] => [margin + x * sx, margin + z * sz];

    ctx.fillStyle = COLOR_POOL;
    ctx.fillRect(margin, margin, poolX * sx, poolZ * sz);
    ctx.strokeStyle = "#3f72a8";
    ctx.lineWidth = 2;
    line(ctx, toPx(0, 0), toPx(poolX, 0)); // waterline

    const active = model.activeGate();
    for (const g of model.orderedGates()) {
      const passed = model.gatePanel().find((r) => r.id === g.id)?.passed;
      ctx.strokeStyle = passed ? COLOR_PASSED : g === active ? COLOR_ACTIVE : COLOR_PENDING;
      ctx.lineWidth = 3;
      const [cx, , cz] = g.center;
      const half = gateHalfHeight(g);
      line(ctx, toPx(cx, cz - half), toPx(cx, cz + half));
    }

    const t = model.telemetry;
    if (t) {
      ctx.strokeStyle = COLOR_SET;
      ctx.setLineDash([4, 4]);
      line(ctx, toPx(t.x - 0.5, t.depth_set), toPx(t.x + 0.5, t.depth_set));
      ctx.setLineDash([]);
      ctx.fillStyle = COLOR_VEHICLE;
      const [px, py] = toPx(t.x, t.z);
      ctx.beginPath();
      ctx.ellipse(px, py, 7, 4, 0, 0, 2 * Math.PI);
      ctx.fill();
    }
  }

  private renderStatus(model: ConsoleModel, wallMs: number, connected: boolean): void {
    const el = this.el.status;
    if (!connected) {
      el.textContent = "DISCONNECTED - reconnecting";
      el.className = "banner bad";
    } else if (model.isStale(wallMs)) {
      el.textContent = "LINK STALE - no frames for 2 s";
      el.className = "banner bad";
    } else if (model.summary) {
      el.textContent = model.summary.mission.completed ? "MISSION COMPLETE" : "MISSION ENDED";
      el.className = "banner good";
    } else {
      const mode = model.scenario ? `pilot ${model.scenario.pilot_mode}, x${model.scenario.time_scale}` : "";
      el.textContent = `live ${mode}`;
      el.className = "banner ok";
    }
  }

  private renderLink(model: ConsoleModel, wallMs: number): void {
    const t = model.telemetry;
    if (!t || !model.scenario) {
      this.el.linkBox.textContent = "no telemetry yet";
      return;
    }
    // extrapolate the countdown between frames using the time scale
    const simSince = ((wallMs - model.lastFrameWall) / 1000) * model.scenario.time_scale;
    const countdown = Math.max(0, t.link.next_slot_in - simSince);
    const fmtByte = (b: number | null) => (b === null ? "-" : String(b));
    this.el.linkBox.innerHTML =
      `next slot in <b>${countdown.toFixed(1)} s</b><br>` +
      `last byte sent: <b>${fmtByte(t.link.last_byte)}</b> ` +
      `pending: <b>${fmtByte(t.link.pending)}</b><br>` +
      `transmissions: ${model.commandsSent} (${model.commandsLost} lost)`;
  }

  private renderMission(model: ConsoleModel): void {
    const rows = model.gatePanel().map((r) =>
      `<tr><td>gate ${r.id}</td><td>${r.attempts}</td><td>${r.passed ? "passed" : "-"}</td></tr>`);
    const elapsed = model.missionElapsed();
    const clock = elapsed === null ? "waiting for first attempt" : `${elapsed.toFixed(1)} s`;
    this.el.missionBox.innerHTML =
      `<table><tr><th>gate</th><th>attempts</th><th></th></tr>${rows.join("")}</table>` +
      `<div>mission clock: <b>${clock}</b>` +
      `${model.telemetry ? ` &middot; sim t ${model.telemetry.t.toFixed(1)} s` : ""}</div>`;
  }

  private renderFeed(model: ConsoleModel): void {
    const items = model.feed.slice(-12).reverse().map(
      (f) => `<div>[${f.t.toFixed(1)}] ${f.text}</div>`);
    this.el.feedBox.innerHTML = items.join("");
  }

  private renderCommand(lastSent: CommandFrame | null): void {
    if (!lastSent) {
      this.el.commandBox.textContent = "no command sent";
      return;
    }
    const thrustNames = ["back", "slow-back", "stop", "slow-fwd", "forward"];
    const depthNames = ["lower", "hold", "raise"];
    this.el.commandBox.innerHTML =
      `heading <b>${headingDeg(lastSent.heading_idx).toFixed(1)}&deg;</b> ` +
      `thrust <b>${thrustNames[lastSent.thrust_state]}</b> ` +
      `depth <b>${depthNames[lastSent.depth_inc]}</b>`;
  }
}

function gateHalfWidth(g: ScenarioGate): number {
  return g.shape.kind === "circle" ? g.shape.radius! : g.shape.width! / 2;
}

function gateHalfHeight(g: ScenarioGate): number {
  return g.shape.kind === "circle" ? g.shape.radius! : g.shape.height! / 2;
}

function line(ctx: CanvasRenderingContext2D, a: [number, number], b: [number, number]): void {
  ctx.beginPath();
  ctx.moveTo(a[0], a[1]);
  ctx.lineTo(b[0], b[1]);
  ctx.stroke();
}

function arrow(ctx: CanvasRenderingContext2D, from: [number, number], to: [number, number]): void {
  line(ctx, from, to);
  const ang = Math.atan2(to[1] - from[1], to[0] - from[0]);
  for (const side of [-1, 1]) {
    line(ctx, to, [to[0] - 7 * Math.cos(ang + side * 0.5), to[1] - 7 * Math.sin(ang + side * 0.5)]);
  }
}

function drawVehicle(ctx: CanvasRenderingContext2D, at: [number, number], psi: number,
                     scale: number): void {
  // compass yaw: 0 = up the screen, clockwise positive
  const ang = psi - Math.PI / 2;
  const len = Math.max(10, 0.45 * scale);
  ctx.fillStyle = COLOR_VEHICLE;
  ctx.beginPath();
  ctx.moveTo(at[0] + len * 0.6 * Math.cos(ang), at[1] + len * 0.6 * Math.sin(ang));
  ctx.lineTo(at[0] + len * 0.35 * Math.cos(ang + 2.5), at[1] + len * 0.35 * Math.sin(ang + 2.5));
  ctx.lineTo(at[0] + len * 0.35 * Math.cos(ang - 2.5), at[1] + len * 0.35 * Math.sin(ang - 2.5));
  ctx.closePath();
  ctx.fill();
}
