// View model: everything the screen shows, reconstructed purely from
// received frames plus local input state. Holds no simulation truth of its
// own; reconnecting mid-run starts from the scenario frame's progress
// snapshot and stays consistent from the following telemetry and events.

import {
  EventFrame, ScenarioDetail, ScenarioGate, ServerFrame, SummaryFrame, TelemetryFrame,
} from "./protocol.js";

export interface GatePanelRow {
  id: number;
  order: number;
  attempts: number;   // failed crossings + 1 once passed
  passed: boolean;
}

export interface FeedItem {
  t: number;
  text: string;
}

const FEED_LIMIT = 250;
const STALE_MS = 2000;

export class ConsoleModel {
  scenario: ScenarioDetail | null = null;
  telemetry: TelemetryFrame | null = null;
  summary: SummaryFrame | null = null;
  lastError: string | null = null;
  feed: FeedItem[] = [];

  commandsSent = 0;      // transmissions observed on the link
  commandsLost = 0;
  lastFrameWall = -Infinity;
  private failedAttempts = new Map<number, number>();
  private passedGates = new Set<number>();
  private firstGateEventT: number | null = null;
  private finalPassT: number | null = null;

  apply(frame: ServerFrame, wallMs: number): void {
    this.lastFrameWall = wallMs;
    switch (frame.type) {
      case "telemetry":
        this.telemetry = frame;
        break;
      case "event":
        this.applyEvent(frame);
        break;
      case "summary":
        this.summary = frame;
        this.pushFeed(frame.mission.end_time,
          frame.mission.completed
            ? `mission complete in ${fmt(frame.mission.total_time)} s`
            : "mission ended incomplete");
        break;
      case "error":
        this.lastError = frame.detail;
        this.pushFeed(this.telemetry?.t ?? 0, `error: ${frame.detail}`);
        break;
    }
  }

  private applyEvent(frame: EventFrame): void {
    const d = frame.detail as Record<string, unknown>;
    switch (frame.kind) {
      case "scenario": {
        this.scenario = frame.detail as unknown as ScenarioDetail;
        this.failedAttempts.clear();
        this.passedGates.clear();
        for (const g of this.scenario.gates) {
          if (g.failed_attempts) this.failedAttempts.set(g.id, g.failed_attempts);
          if (g.passed) this.passedGates.add(g.id);
        }
        break;
      }
      case "gate_pass": {
        const id = d.ref as number;
        this.passedGates.add(id);
        this.noteGateEvent(d.t as number, id);
        this.finalPassT = d.t as number;
        this.pushFeed(d.t as number, `gate ${id} passed`);
        break;
      }
      case "gate_miss_near":
      case "gate_wrong_side": {
        const id = d.ref as number;
        this.failedAttempts.set(id, (this.failedAttempts.get(id) ?? 0) + 1);
        this.noteGateEvent(d.t as number, id);
        this.pushFeed(d.t as number,
          frame.kind === "gate_miss_near" ? `gate ${id} near miss` : `gate ${id} wrong side`);
        break;
      }
      case "transmit": {
        this.commandsSent += 1;
        if (d.lost) this.commandsLost += 1;
        break;
      }
      case "mission_complete":
        this.pushFeed(d.t as number, "course complete");
        break;
      case "apply":
        this.pushFeed(d.t as number, `executed byte ${String(d.note ?? "")}`.trim());
        break;
      default:
        break; // submit/stale/invalid stay off the feed to keep it readable
    }
  }

  private noteGateEvent(t: number, id: number): void {
    const first = this.orderedGates()[0];
    if (this.firstGateEventT === null && first && id === first.id) {
      this.firstGateEventT = t;
    }
  }

  private pushFeed(t: number, text: string): void {
    this.feed.push({ t, text });
    if (this.feed.length > FEED_LIMIT) this.feed.splice(0, this.feed.length - FEED_LIMIT);
  }

  orderedGates(): ScenarioGate[] {
    if (!this.scenario) return [];
    return [...this.scenario.gates].sort((a, b) => a.order - b.order);
  }

  gatePanel(): GatePanelRow[] {
    return this.orderedGates().map((g) => {
      const passed = this.passedGates.has(g.id);
      return {
        id: g.id,
        order: g.order,
        attempts: (this.failedAttempts.get(g.id) ?? 0) + (passed ? 1 : 0),
        passed,
      };
    });
  }

  attempts(): number[] {
    return this.gatePanel().map((r) => r.attempts);
  }

  activeGate(): ScenarioGate | null {
    for (const g of this.orderedGates()) {
      if (!this.passedGates.has(g.id)) return g;
    }
    return null;
  }

  missionElapsed(): number | null {
    if (this.firstGateEventT === null) return null;
    const end = this.finalPassT !== null && this.activeGate() === null
      ? this.finalPassT
      : this.telemetry?.t ?? this.firstGateEventT;
    return end - this.firstGateEventT;
  }

  isStale(wallMs: number): boolean {
    return wallMs - this.lastFrameWall > STALE_MS;
  }
}

function fmt(v: number | null): string {
  return v === null ? "?" : v.toFixed(1);
}
