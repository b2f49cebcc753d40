// Keyboard/gamepad capture onto the quantized command set.
//
// Direction keys (arrows or WASD, combinable for diagonals) aim the fish at
// the pressed screen direction and push forward (slow with Shift); Z/X hold
// slow-back/back along the current heading; Q/E nudge the commanded heading
// one 22.5 deg sector. R/F are edge-triggered depth increments: one press
// emits exactly one raise/lower command, then the stream returns to hold,
// so a held key can never run the depth setpoint away.

import {
  CommandFrame, DEPTH_HOLD, DEPTH_LOWER, DEPTH_RAISE, THRUST_BACK, THRUST_FORWARD,
  THRUST_SLOW_BACK, THRUST_SLOW_FORWARD, THRUST_STOP, makeCommand, nearestHeadingIdx,
} from "./protocol.js";

const KEY_DIRS: Record<string, [number, number]> = {
  ArrowUp: [0, 1], KeyW: [0, 1],
  ArrowDown: [0, -1], KeyS: [0, -1],
  ArrowLeft: [-1, 0], KeyA: [-1, 0],
  ArrowRight: [1, 0], KeyD: [1, 0],
};

export function directionToHeadingIdx(dx: number, dy: number): number | null {
  if (dx === 0 && dy === 0) return null;
  const deg = (Math.atan2(dx, dy) * 180) / Math.PI; // screen-up is North
  return nearestHeadingIdx(deg);
}

// gamepad stick: x right, y down (browser convention), small deadzone
export function stickToHeadingIdx(x: number, y: number, deadzone = 0.25): number | null {
  if (Math.hypot(x, y) < deadzone) return null;
  return directionToHeadingIdx(x, -y);
}

export class InputTracker {
  private pressed = new Set<string>();
  private shift = false;
  private headingIdx: number;
  private pendingDepth: number[] = [];
  private stickIdx: number | null = null;
  private stickSlow = false;

  constructor(initialHeadingIdx = 0) {
    this.headingIdx = initialHeadingIdx;
  }

  /** Gamepad channel: aimed cardinal (or null when centered) + gentle flag.
   * Keyboard directions take precedence when both are active. */
  setStick(idx: number | null, slow = false): void {
    this.stickIdx = idx;
    this.stickSlow = slow;
  }

  keydown(code: string, shiftKey = false): void {
    this.shift = shiftKey;
    if (this.pressed.has(code)) return; // ignore key repeat: depth is edge-triggered
    this.pressed.add(code);
    if (code === "KeyR") this.pendingDepth.push(DEPTH_RAISE);
    if (code === "KeyF") this.pendingDepth.push(DEPTH_LOWER);
    if (code === "KeyQ") this.headingIdx = (this.headingIdx + 15) % 16;
    if (code === "KeyE") this.headingIdx = (this.headingIdx + 1) % 16;
  }

  keyup(code: string, shiftKey = false): void {
    this.shift = shiftKey;
    this.pressed.delete(code);
  }

  clear(): void {
    this.pressed.clear();
    this.pendingDepth.length = 0;
    this.stickIdx = null;
  }

  /** One outbound frame: current direction/thrust plus at most one queued
   * depth increment. Called at the send cadence (<= 10 Hz). */
  sample(): CommandFrame {
    let dx = 0;
    let dy = 0;
    for (const [code, [cx, cy]] of Object.entries(KEY_DIRS)) {
      if (this.pressed.has(code)) {
        dx += cx;
        dy += cy;
      }
    }
    const aimed = directionToHeadingIdx(dx, dy);
    let thrust = THRUST_STOP;
    if (aimed !== null) {
      this.headingIdx = aimed;
      thrust = this.shift ? THRUST_SLOW_FORWARD : THRUST_FORWARD;
    } else if (this.stickIdx !== null) {
      this.headingIdx = this.stickIdx;
      thrust = this.stickSlow ? THRUST_SLOW_FORWARD : THRUST_FORWARD;
    } else if (this.pressed.has("KeyX")) {
      thrust = THRUST_BACK;
    } else if (this.pressed.has("KeyZ")) {
      thrust = THRUST_SLOW_BACK;
    }
    const depth = this.pendingDepth.length ? this.pendingDepth.shift()! : DEPTH_HOLD;
    return makeCommand(this.headingIdx, thrust, depth);
  }
}

/** Coalescing sender: samples the tracker at a fixed cadence and hands the
 * latest frame to `send`. Key presses between samples collapse onto the
 * next frame; queued depth increments drain one per frame. */
export class CommandSender {
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private tracker: InputTracker,
    private send: (frame: CommandFrame) => void,
    private periodMs = 100,
  ) {}

  start(): void {
    if (this.timer === null) {
      this.timer = setInterval(() => this.send(this.tracker.sample()), this.periodMs);
    }
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }
}
