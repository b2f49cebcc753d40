import { beforeEach, describe, expect, it } from "vitest";

import { ConsoleModel } from "../src/model.js";
import { ScenarioGate, ServerFrame } from "../src/protocol.js";

function gate(id: number, order: number, extra: Partial<ScenarioGate> = {}): ScenarioGate {
  return {
    id, order, center: [id * 2, 4, 0.5], normal: [1, 0],
    shape: { kind: "circle", radius: 0.375 },
    failed_attempts: 0, passed: false, ...extra,
  };
}

function scenarioFrame(gates: ScenarioGate[]): ServerFrame {
  return {
    type: "event", kind: "scenario",
    detail: {
      name: "test", pool: [12.5, 8, 2.1], gates,
      start_pose: { x: 1.5, y: 4, z: 0.5, yaw: 1.57 },
      slot_interval: 1.6, time_limit: 600, time_scale: 1, pilot_mode: "external",
    } as unknown as Record<string, unknown>,
  };
}

function telemetry(t: number): ServerFrame {
  return {
    type: "telemetry", t, x: 1, y: 2, z: 0.5, psi: 0,
    depth_set: 0.5, heading_set: 0,
    link: { next_slot_in: 1.0, last_byte: null, pending: null },
  };
}

function gateEvent(kind: string, id: number, t: number): ServerFrame {
  return { type: "event", kind, detail: { t, ref: id, note: "" } };
}

describe("mission panel", () => {
  let model: ConsoleModel;

  beforeEach(() => {
    model = new ConsoleModel();
    model.apply(scenarioFrame([gate(1, 1), gate(2, 2), gate(3, 3), gate(4, 4)]), 0);
  });

  it("starts with all gates unpassed and zero attempts", () => {
    expect(model.attempts()).toEqual([0, 0, 0, 0]);
    expect(model.activeGate()?.id).toBe(1);
    expect(model.missionElapsed()).toBeNull();
  });

  it("counts misses plus the eventual pass, like the scorer", () => {
    model.apply(gateEvent("gate_miss_near", 1, 8), 1);
    model.apply(gateEvent("gate_pass", 1, 30), 2);
    model.apply(gateEvent("gate_wrong_side", 2, 45), 3);
    model.apply(gateEvent("gate_pass", 2, 60), 4);
    expect(model.attempts()).toEqual([2, 2, 0, 0]);
    expect(model.activeGate()?.id).toBe(3);
  });

  it("mission clock runs from the first gate-1 event", () => {
    model.apply(gateEvent("gate_miss_near", 1, 10), 1);
    model.apply(telemetry(25), 2);
    expect(model.missionElapsed()).toBeCloseTo(15);
    model.apply(gateEvent("gate_pass", 1, 30), 3);
    model.apply(gateEvent("gate_pass", 2, 50), 4);
    model.apply(gateEvent("gate_pass", 3, 70), 5);
    model.apply(gateEvent("gate_pass", 4, 139), 6);
    model.apply(telemetry(200), 7);  // clock freezes at the final pass
    expect(model.missionElapsed()).toBeCloseTo(129);
  });

  it("applies PASS events to the gate markers", () => {
    model.apply(gateEvent("gate_pass", 1, 10), 1);
    const panel = model.gatePanel();
    expect(panel[0].passed).toBe(true);
    expect(panel[1].passed).toBe(false);
  });

  it("reconstructs mid-run state from the scenario progress snapshot", () => {
    const rejoined = new ConsoleModel();
    rejoined.apply(scenarioFrame([
      gate(1, 1, { passed: true }),
      gate(2, 2, { failed_attempts: 2 }),
      gate(3, 3), gate(4, 4),
    ]), 0);
    expect(rejoined.attempts()).toEqual([1, 2, 0, 0]);
    expect(rejoined.activeGate()?.id).toBe(2);
    rejoined.apply(gateEvent("gate_pass", 2, 80), 1);
    expect(rejoined.attempts()).toEqual([1, 3, 0, 0]);
  });
});

describe("link and staleness", () => {
  it("tracks transmissions and losses", () => {
    const model = new ConsoleModel();
    model.apply({ type: "event", kind: "transmit", detail: { t: 1.6, seq: 1, byte: 7, lost: false } }, 0);
    model.apply({ type: "event", kind: "transmit", detail: { t: 3.2, seq: 2, byte: 8, lost: true } }, 1);
    expect(model.commandsSent).toBe(2);
    expect(model.commandsLost).toBe(1);
  });

  it("flags a stale feed after 2 s without frames", () => {
    const model = new ConsoleModel();
    model.apply(telemetry(1), 1000);
    expect(model.isStale(2900)).toBe(false);
    expect(model.isStale(3100)).toBe(true);
  });

  it("keeps error frames visible", () => {
    const model = new ConsoleModel();
    model.apply({ type: "error", detail: "bad command" }, 0);
    expect(model.lastError).toBe("bad command");
  });
});

describe("summary", () => {
  it("records the authoritative mission result", () => {
    const model = new ConsoleModel();
    model.apply(scenarioFrame([gate(1, 1)]), 0);
    model.apply(gateEvent("gate_pass", 1, 12), 1);
    model.apply({
      type: "summary",
      mission: { attempts: [1], passed: [true], total_time: 12, completed: true, end_time: 12 },
      comm: {},
    }, 2);
    expect(model.summary?.mission.completed).toBe(true);
    expect(model.attempts()).toEqual(model.summary!.mission.attempts);
  });
});
