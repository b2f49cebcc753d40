// Wire protocol spoken with the teleauv gateway: JSON text frames over a
// websocket. Server->console: telemetry / event / summary / error.
// Console->server: command frames carrying the quantized desired state.

export const HEADING_COUNT = 16;
export const HEADING_STEP_DEG = 360 / HEADING_COUNT;

export const THRUST_BACK = 0;
export const THRUST_SLOW_BACK = 1;
export const THRUST_STOP = 2;
export const THRUST_SLOW_FORWARD = 3;
export const THRUST_FORWARD = 4;

export const DEPTH_LOWER = 0; // sink (z grows downward)
export const DEPTH_HOLD = 1;
export const DEPTH_RAISE = 2;

export interface CommandFrame {
  type: "command";
  heading_idx: number;
  thrust_state: number;
  depth_inc: number;
}

export interface LinkIndicator {
  next_slot_in: number;
  last_byte: number | null;
  pending: number | null;
}

export interface TelemetryFrame {
  type: "telemetry";
  t: number;
  x: number;
  y: number;
  z: number;
  psi: number;
  depth_set: number;
  heading_set: number;
  link: LinkIndicator;
}

export interface GateShape {
  kind: "circle" | "rectangle";
  radius?: number;
  width?: number;
  height?: number;
}

export interface ScenarioGate {
  id: number;
  order: number;
  center: [number, number, number];
  normal: [number, number];
  shape: GateShape;
  failed_attempts: number;
  passed: boolean;
}

export interface ScenarioDetail {
  name: string;
  pool: [number, number, number];
  gates: ScenarioGate[];
  start_pose: { x: number; y: number; z: number; yaw: number };
  slot_interval: number;
  time_limit: number;
  time_scale: number;
  pilot_mode: string;
}

export interface EventFrame {
  type: "event";
  kind: string;
  detail: Record<string, unknown>;
}

export interface MissionSummary {
  attempts: number[];
  passed: boolean[];
  total_time: number | null;
  completed: boolean;
  end_time: number;
}

export interface SummaryFrame {
  type: "summary";
  mission: MissionSummary;
  comm: Record<string, number>;
}

export interface ErrorFrame {
  type: "error";
  detail: string;
}

export type ServerFrame = TelemetryFrame | EventFrame | SummaryFrame | ErrorFrame;

function isInt(v: unknown, lo: number, hi: number): boolean {
  return typeof v === "number" && Number.isInteger(v) && v >= lo && v <= hi;
}

export function isValidCommand(c: {
  heading_idx: number; thrust_state: number; depth_inc: number;
}): boolean {
  return isInt(c.heading_idx, 0, 15) && isInt(c.thrust_state, 0, 4) && isInt(c.depth_inc, 0, 2);
}

export function makeCommand(headingIdx: number, thrustState: number, depthInc: number): CommandFrame {
  const frame = {
    type: "command" as const,
    heading_idx: headingIdx,
    thrust_state: thrustState,
    depth_inc: depthInc,
  };
  if (!isValidCommand(frame)) {
    throw new Error(`invalid command ${headingIdx}/${thrustState}/${depthInc}`);
  }
  return frame;
}

// byte layout used by the gateway; shown in the link indicator
export function commandByte(c: CommandFrame): number {
  return c.heading_idx * 15 + c.thrust_state * 3 + c.depth_inc;
}

export function nearestHeadingIdx(angleDeg: number): number {
  // double modulo also normalizes the -0 that Math.round can produce
  return ((Math.round(angleDeg / HEADING_STEP_DEG) % HEADING_COUNT) + HEADING_COUNT)
    % HEADING_COUNT;
}

export function headingDeg(idx: number): number {
  return idx * HEADING_STEP_DEG;
}

export function parseServerFrame(text: string): ServerFrame | null {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch {
    return null;
  }
  if (typeof raw !== "object" || raw === null) return null;
  const frame = raw as Record<string, unknown>;
  switch (frame.type) {
    case "telemetry":
      if (typeof frame.t !== "number" || typeof frame.x !== "number"
        || typeof frame.y !== "number" || typeof frame.z !== "number"
        || typeof frame.psi !== "number" || typeof frame.link !== "object") return null;
      return frame as unknown as TelemetryFrame;
    case "event":
      if (typeof frame.kind !== "string") return null;
      return frame as unknown as EventFrame;
    case "summary":
      if (typeof frame.mission !== "object") return null;
      return frame as unknown as SummaryFrame;
    case "error":
      if (typeof frame.detail !== "string") return null;
      return frame as unknown as ErrorFrame;
    default:
      return null;
  }
}
