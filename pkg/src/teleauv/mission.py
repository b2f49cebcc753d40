"""Gate course geometry, traversal detection, mission logging and statistics.

A gate is a vertical aperture (circle or rectangle) in a plane whose
horizontal normal fixes the required crossing direction. Detection works on
consecutive state pairs: the segment must strictly change side of the plane,
and the intersection point decides PASS (right direction, inside the
aperture), WRONG_SIDE (backwards through the aperture), MISS_NEAR (right
direction, outside the aperture but within twice its extent; a countable
failed attempt) or NONE. Crossings that merely graze the plane without a
strict side change never count, so a path cannot double-score.

The mission log keeps three ground-truth tables (decimated state rows,
events, link transmissions); scoring and the communication statistics are
pure functions of the log, so recomputing them offline from the CSV files
reproduces the live summary exactly.
"""

import csv
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import TYPE_CHECKING

from .link import Transmission, transmissions_csv_rows
from .vehicle import VehicleState

if TYPE_CHECKING:
    from .scenario import Scenario


class Crossing(Enum):
    NONE = "none"
    PASS = "pass"
    WRONG_SIDE = "wrong_side"
    MISS_NEAR = "miss_near"


# factor on the aperture half-extents within which a failed plane crossing
# still counts as an attempt
NEAR_MISS_FACTOR = 2.0


@dataclass(frozen=True, slots=True)
class CircleShape:
    radius: float  # m

    def inside(self, lat: float, vert: float) -> bool:
        return lat * lat + vert * vert <= self.radius * self.radius

    def near(self, lat: float, vert: float) -> bool:
        r2 = NEAR_MISS_FACTOR * self.radius
        return lat * lat + vert * vert <= r2 * r2

    def half_extents(self) -> tuple[float, float]:
        return self.radius, self.radius


@dataclass(frozen=True, slots=True)
class RectShape:
    width: float   # m, horizontal extent
    height: float  # m, vertical extent

    def inside(self, lat: float, vert: float) -> bool:
        return abs(lat) <= self.width / 2.0 and abs(vert) <= self.height / 2.0

    def near(self, lat: float, vert: float) -> bool:
        return (abs(lat) <= NEAR_MISS_FACTOR * self.width / 2.0
                and abs(vert) <= NEAR_MISS_FACTOR * self.height / 2.0)

    def half_extents(self) -> tuple[float, float]:
        return self.width / 2.0, self.height / 2.0


@dataclass(frozen=True, slots=True)
class Gate:
    id: int
    center: tuple[float, float, float]  # m, (x, y, z)
    normal: tuple[float, float]         # unit, required crossing direction in the horizontal plane
    shape: CircleShape | RectShape
    order: int                          # 1-based traversal index

    def plane_offset(self, x: float, y: float) -> float:
        """Signed distance from the gate plane; negative is the approach side."""
        return self.normal[0] * (x - self.center[0]) + self.normal[1] * (y - self.center[1])

    def lateral_offset(self, x: float, y: float) -> float:
        """In-plane horizontal offset from the gate axis."""
        tx, ty = -self.normal[1], self.normal[0]
        return tx * (x - self.center[0]) + ty * (y - self.center[1])


def detect_crossing(prev: VehicleState, nxt: VehicleState, gate: Gate) -> Crossing:
    """Classify the motion segment prev -> nxt against one gate.

    Requires a strict side change of the plane-offset sign; endpoints exactly
    on the plane (or motion within it) yield NONE. Only crossings in the
    +normal direction can PASS or MISS_NEAR; a backwards crossing counts only
    when it goes through the aperture itself (WRONG_SIDE).
    """
    s0 = gate.plane_offset(prev.x, prev.y)
    s1 = gate.plane_offset(nxt.x, nxt.y)
    if s0 == 0.0 or s1 == 0.0 or (s0 > 0.0) == (s1 > 0.0):
        return Crossing.NONE

    frac = s0 / (s0 - s1)
    px = prev.x + frac * (nxt.x - prev.x)
    py = prev.y + frac * (nxt.y - prev.y)
    pz = prev.z + frac * (nxt.z - prev.z)
    lat = gate.lateral_offset(px, py)
    vert = pz - gate.center[2]
    forward = s0 < 0.0

    if gate.shape.inside(lat, vert):
        return Crossing.PASS if forward else Crossing.WRONG_SIDE
    if forward and gate.shape.near(lat, vert):
        return Crossing.MISS_NEAR
    return Crossing.NONE


# ---------------------------------------------------------------------------
# mission log

# event kinds written to events.csv; ref column meaning depends on the kind
EV_SUBMIT = "submit"            # ref = byte handed to the link
EV_APPLY = "apply"              # ref = transmission seq (command executed onboard)
EV_STALE = "stale_drop"         # ref = transmission seq suppressed as out of date
EV_INVALID = "invalid_byte"     # ref = transmission seq carrying a non-command byte
EV_GATE_PASS = "gate_pass"      # ref = gate id
EV_GATE_WRONG = "gate_wrong_side"
EV_GATE_MISS = "gate_miss_near"
EV_COMPLETE = "mission_complete"
EV_DIVERGED = "divergence"

_GATE_EVENT_OF = {
    Crossing.PASS: EV_GATE_PASS,
    Crossing.WRONG_SIDE: EV_GATE_WRONG,
    Crossing.MISS_NEAR: EV_GATE_MISS,
}


@dataclass(frozen=True, slots=True)
class Event:
    t: float
    kind: str
    ref: int | None = None
    detail: str = ""


@dataclass(frozen=True, slots=True)
class StateRow:
    t: float
    x: float
    y: float
    z: float
    psi: float
    u: float
    w: float
    r: float
    depth_set: float
    heading_set: float
    f_z: float
    m_z: float
    f_x: float


STATE_COLUMNS = ("t", "x", "y", "z", "psi", "u", "w", "r",
                 "depth_set", "heading_set", "Fz", "Mz", "Fx")


class MissionLog:
    """Time-ordered ground-truth record of one run."""

    def __init__(self) -> None:
        self.states: list[StateRow] = []
        self.events: list[Event] = []
        self.transmissions: list[Transmission] = []

    def add_event(self, t: float, kind: str, ref: int | None = None, detail: str = "") -> Event:
        if self.events and t < self.events[-1].t:
            raise ValueError("event timestamps must be non-decreasing")
        ev = Event(t=t, kind=kind, ref=ref, detail=detail)
        self.events.append(ev)
        return ev

    def add_state(self, row: StateRow) -> None:
        self.states.append(row)

    def gate_events(self) -> list[Event]:
        return [e for e in self.events if e.kind in (EV_GATE_PASS, EV_GATE_WRONG, EV_GATE_MISS)]


@dataclass(frozen=True, slots=True)
class MissionResult:
    attempts: list[int]        # per gate, in traversal order
    passed: list[bool]         # per gate, in traversal order
    total_time: float | None   # s, first gate-1 event to final pass; None if incomplete
    completed: bool
    end_time: float            # s, sim time when the run stopped


@dataclass(frozen=True, slots=True)
class CommStats:
    commands_sent: int        # transmitted slots
    command_variations: int   # transmissions whose byte differs from the previous one
    variations_lost: int
    loss_pct: float           # 100 * variations_lost / command_variations
    delay_mean: float         # s, send to onboard execution, executed messages only
    delay_var: float          # s^2


def score(log: MissionLog, scenario: "Scenario") -> MissionResult:
    """Per-gate attempts and total mission time from the event log.

    An attempt is a failed crossing event (near miss or wrong side) plus one
    for the eventual pass. The clock runs from the first event at the first
    gate to the pass of the last gate and is never paused.
    """
    gates = sorted(scenario.gates, key=lambda g: g.order)
    attempts = []
    passed = []
    pass_time: dict[int, float] = {}
    first_event: dict[int, float] = {}
    for ev in log.gate_events():
        if ev.ref not in first_event:
            first_event[ev.ref] = ev.t
        if ev.kind == EV_GATE_PASS and ev.ref not in pass_time:
            pass_time[ev.ref] = ev.t
    for g in gates:
        fails = sum(1 for ev in log.gate_events()
                    if ev.ref == g.id and ev.kind in (EV_GATE_WRONG, EV_GATE_MISS))
        ok = g.id in pass_time
        attempts.append(fails + (1 if ok else 0))
        passed.append(ok)

    completed = all(passed) and bool(gates)
    total_time = None
    if completed:
        start = first_event[gates[0].id]
        finish = pass_time[gates[-1].id]
        total_time = finish - start
    end_time = log.states[-1].t if log.states else (log.events[-1].t if log.events else 0.0)
    return MissionResult(attempts=attempts, passed=passed, total_time=total_time,
                         completed=completed, end_time=end_time)


def comm_stats(log: MissionLog) -> CommStats:
    """Table-II style statistics computed from ground truth, no estimation.

    Loss is counted over command variations only (a transmission whose byte
    differs from the one before it); delay runs from the slot send time to
    the onboard tick that executed the command.
    """
    tx = log.transmissions
    variations = 0
    lost = 0
    prev_byte: int | None = None
    for rec in tx:
        if rec.byte != prev_byte:
            variations += 1
            if rec.lost:
                lost += 1
        prev_byte = rec.byte

    sent_time = {rec.seq: rec.t_sent for rec in tx}
    delays = [ev.t - sent_time[ev.ref] for ev in log.events
              if ev.kind == EV_APPLY and ev.ref in sent_time]
    n = len(delays)
    mean = sum(delays) / n if n else 0.0
    var = sum((d - mean) ** 2 for d in delays) / n if n else 0.0
    return CommStats(
        commands_sent=len(tx),
        command_variations=variations,
        variations_lost=lost,
        loss_pct=100.0 * lost / variations if variations else 0.0,
        delay_mean=mean,
        delay_var=var,
    )


# ---------------------------------------------------------------------------
# file formats

def write_log(log: MissionLog, out_dir) -> None:
    """Write states.csv, events.csv and transmissions.csv into out_dir.

    Event and transmission floats use repr so parsing them back reproduces
    the exact in-memory values; state rows are fixed-point for plotting.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    with open(out / "states.csv", "w", newline="") as f:
        wr = csv.writer(f, lineterminator="\n")
        wr.writerow(STATE_COLUMNS)
        for s in log.states:
            wr.writerow([f"{s.t:.6f}", f"{s.x:.6f}", f"{s.y:.6f}", f"{s.z:.6f}", f"{s.psi:.6f}",
                         f"{s.u:.6f}", f"{s.w:.6f}", f"{s.r:.6f}", f"{s.depth_set:.6f}",
                         f"{s.heading_set:.6f}", f"{s.f_z:.6f}", f"{s.m_z:.6f}", f"{s.f_x:.6f}"])

    with open(out / "events.csv", "w", newline="") as f:
        wr = csv.writer(f, lineterminator="\n")
        wr.writerow(["t", "kind", "ref", "detail"])
        for e in log.events:
            wr.writerow([repr(e.t), e.kind, "" if e.ref is None else e.ref, e.detail])

    with open(out / "transmissions.csv", "w", newline="") as f:
        f.write("\n".join(transmissions_csv_rows(log.transmissions)) + "\n")


def read_log(run_dir) -> MissionLog:
    """Rebuild a MissionLog from the CSV files written by write_log."""
    run = Path(run_dir)
    log = MissionLog()

    with open(run / "events.csv", newline="") as f:
        for row in csv.DictReader(f):
            log.events.append(Event(
                t=float(row["t"]), kind=row["kind"],
                ref=int(row["ref"]) if row["ref"] != "" else None,
                detail=row["detail"],
            ))

    with open(run / "transmissions.csv", newline="") as f:
        for row in csv.DictReader(f):
            log.transmissions.append(Transmission(
                seq=int(row["seq"]), t_sent=float(row["t_sent"]), byte=int(row["byte"]),
                lost=bool(int(row["lost"])),
                t_arrive=float(row["t_arrive"]) if row["t_arrive"] != "" else None,
            ))

    states_path = run / "states.csv"
    if states_path.exists():
        with open(states_path, newline="") as f:
            for row in csv.DictReader(f):
                log.states.append(StateRow(
                    t=float(row["t"]), x=float(row["x"]), y=float(row["y"]), z=float(row["z"]),
                    psi=float(row["psi"]), u=float(row["u"]), w=float(row["w"]), r=float(row["r"]),
                    depth_set=float(row["depth_set"]), heading_set=float(row["heading_set"]),
                    f_z=float(row["Fz"]), m_z=float(row["Mz"]), f_x=float(row["Fx"]),
                ))
    return log
