"""Fixed-step simulation driver tying channel, vehicle, autonomy and mission.

One tick (default 0.01 s) does, in order: sample the command source (scripted
pilot at the joystick rate, or externally injected operator commands), fire
any due link slots and collect arrivals, run the onboard controller on the
stale-filtered arrivals and the current sensor sample, integrate the vehicle,
and check the segment against the active gate. The driver's clock is
i * dt computed from the integer tick count, so timestamps never drift.

Everything stochastic hangs off two generators (sensor noise and channel)
whose seeds are derived from (scenario seed or CLI seed, repetition index);
identical inputs reproduce identical logs byte for byte.
"""

import json
from collections import deque
from dataclasses import asdict, replace
from pathlib import Path

import numpy as np

from . import codec, mission, vehicle
from .autonomy import OnboardController, Setpoints
from .link import AcousticLink, StaleFilter
from .mission import Crossing, MissionLog, StateRow
from .pilot import PilotConfig, decide
from .scenario import Scenario


def derive_seed(base: int, rep: int, stream: int) -> int:
    """Stable 64-bit sub-seed for (base seed, repetition, stream index)."""
    return int(np.random.SeedSequence([base, rep, stream]).generate_state(1, np.uint64)[0])


class SimDriver:
    """Owns all mutable state of one run; strictly single-threaded stepping."""

    PILOT_SCRIPTED = "scripted"
    PILOT_EXTERNAL = "external"

    def __init__(self, scenario: Scenario, *, master_seed: int | None = None, rep: int = 0,
                 pilot_mode: str = PILOT_SCRIPTED, pilot_cfg: PilotConfig | None = None):
        if pilot_mode not in (self.PILOT_SCRIPTED, self.PILOT_EXTERNAL):
            raise ValueError(f"unknown pilot mode {pilot_mode!r}")
        self.scenario = scenario
        self.pilot_mode = pilot_mode
        self.pilot_cfg = (pilot_cfg or PilotConfig()).validate()
        self.dt = scenario.dt

        env_base = scenario.environment.rng_seed if master_seed is None else master_seed
        link_base = scenario.link.rng_seed if master_seed is None else master_seed
        self.env_seed = derive_seed(env_base, rep, 0)
        self.link_seed = derive_seed(link_base, rep, 1)
        self.master_seed = master_seed
        self.rep = rep

        self.env = scenario.environment
        self.anomaly = scenario.anomaly
        self.params = scenario.vehicle
        self.link = AcousticLink(replace(scenario.link, rng_seed=self.link_seed))
        self.stale = StaleFilter()
        self.sensor_rng = np.random.default_rng(self.env_seed)

        sp = scenario.start_pose
        self.state = vehicle.VehicleState(x=sp.x, y=sp.y, z=sp.z, psi=sp.yaw)
        self.onboard = OnboardController(
            gains=scenario.gains, allocation=scenario.allocation, pool_depth=self.env.pool_z,
            initial=Setpoints(depth_set=sp.z, heading_set=sp.yaw, surge_force_set=0.0),
            buoyancy_feedforward=-scenario.vehicle.buoyancy_residual,
        )

        self.gates = sorted(scenario.gates, key=lambda g: g.order)
        self.gate_index = 0
        self.tick_count = 0
        self.pilot_period = max(1, round(1.0 / (self.pilot_cfg.input_rate * self.dt)))
        self.done = False
        self.diverged = False
        self._external_cmds: deque[codec.Command] = deque()
        self.log = MissionLog()
        self.log.add_state(self._state_row())

    # -- command sources ---------------------------------------------------

    def inject_command(self, cmd: codec.Command) -> None:
        """Queue an operator command (serve mode); consumed on the next tick."""
        self._external_cmds.append(cmd.validate())

    @property
    def active_gate(self):
        return self.gates[self.gate_index] if self.gate_index < len(self.gates) else None

    @property
    def t(self) -> float:
        return self.tick_count * self.dt

    # -- stepping ------------------------------------------------------------

    def tick(self) -> None:
        """Advance the simulation by one fixed step."""
        if self.done:
            return
        t_now = self.tick_count * self.dt
        t_next = (self.tick_count + 1) * self.dt

        if self.pilot_mode == self.PILOT_SCRIPTED:
            if self.tick_count % self.pilot_period == 0 and self.active_gate is not None:
                cmd = decide(self.state, self.active_gate, self.pilot_cfg)
                byte = codec.encode(cmd)
                self.link.submit(byte, t_now)
                self.log.add_event(t_now, mission.EV_SUBMIT, ref=byte)
        else:
            while self._external_cmds:
                byte = codec.encode(self._external_cmds.popleft())
                self.link.submit(byte, t_now)
                self.log.add_event(t_now, mission.EV_SUBMIT, ref=byte)

        delivered = self.link.advance(t_next)
        fresh = self.stale.filter(delivered)
        fresh_seqs = {d.seq for d in fresh}
        for d in delivered:
            if d.seq not in fresh_seqs:
                self.log.add_event(t_next, mission.EV_STALE, ref=d.seq)

        sensors = vehicle.sense(self.state, self.anomaly, self.env, self.sensor_rng)
        thrusts = self.onboard.tick(fresh, sensors, self.dt)
        for d in self.onboard.applied:
            self.log.add_event(t_next, mission.EV_APPLY, ref=d.seq, detail=f"byte={d.byte}")
        for d in self.onboard.rejected:
            self.log.add_event(t_next, mission.EV_INVALID, ref=d.seq, detail=f"byte={d.byte}")

        prev = self.state
        try:
            stepped = vehicle.step(prev, thrusts, self.env, self.params, self.dt)
        except vehicle.NumericalDivergenceError as e:
            self.log.add_event(t_next, mission.EV_DIVERGED, detail=str(e))
            self.diverged = True
            self.done = True
            self._sync_transmissions()
            return
        self.state = replace(stepped, t=t_next)  # keep the drift-free clock
        self.tick_count += 1

        gate = self.active_gate
        if gate is not None:
            crossing = mission.detect_crossing(prev, self.state, gate)
            if crossing is Crossing.PASS:
                self.log.add_event(t_next, mission.EV_GATE_PASS, ref=gate.id)
                self.gate_index += 1
                if self.gate_index == len(self.gates):
                    self.log.add_event(t_next, mission.EV_COMPLETE)
                    self.done = True
            elif crossing is Crossing.WRONG_SIDE:
                self.log.add_event(t_next, mission.EV_GATE_WRONG, ref=gate.id)
            elif crossing is Crossing.MISS_NEAR:
                self.log.add_event(t_next, mission.EV_GATE_MISS, ref=gate.id)

        if self.tick_count % self.scenario.log_decimation == 0 or self.done:
            self.log.add_state(self._state_row())
        if not self.done and self.t >= self.scenario.time_limit:
            self.done = True
            if self.tick_count % self.scenario.log_decimation != 0:
                self.log.add_state(self._state_row())
        if self.done:
            self._sync_transmissions()

    def run(self) -> None:
        """Step until the mission completes, diverges or times out."""
        while not self.done:
            self.tick()

    def _sync_transmissions(self) -> None:
        self.log.transmissions = list(self.link.records)

    def _state_row(self) -> StateRow:
        sp = self.onboard.setpoints
        dbg = self.onboard.debug
        return StateRow(t=self.t, x=self.state.x, y=self.state.y, z=self.state.z,
                        psi=self.state.psi, u=self.state.u, w=self.state.w, r=self.state.r,
                        depth_set=sp.depth_set, heading_set=sp.heading_set,
                        f_z=dbg.f_z, m_z=dbg.m_z, f_x=dbg.f_x)

    # -- results -------------------------------------------------------------

    def result(self) -> mission.MissionResult:
        self._sync_transmissions()
        return mission.score(self.log, self.scenario)

    def comm(self) -> mission.CommStats:
        self._sync_transmissions()
        return mission.comm_stats(self.log)

    def summary(self) -> dict:
        """Everything analyze needs to recompute and verify this run."""
        return {
            "scenario": {
                "name": self.scenario.name,
                "time_limit": self.scenario.time_limit,
                "gates": [{"id": g.id, "order": g.order} for g in self.gates],
            },
            "seeds": {
                "master": self.master_seed,
                "rep": self.rep,
                "environment": self.env_seed,
                "link": self.link_seed,
            },
            "diverged": self.diverged,
            "mission": asdict(self.result()),
            "comm": asdict(self.comm()),
        }

    def write_logs(self, out_dir) -> None:
        out = Path(out_dir)
        self._sync_transmissions()
        mission.write_log(self.log, out)
        with open(out / "summary.json", "w") as f:
            json.dump(self.summary(), f, indent=2)
            f.write("\n")

    # -- telemetry (serve mode) -----------------------------------------------

    def telemetry(self) -> dict:
        """Ground-truth telemetry frame for the operator console."""
        sp = self.onboard.setpoints
        return {
            "type": "telemetry",
            "t": self.t,
            "x": self.state.x, "y": self.state.y, "z": self.state.z, "psi": self.state.psi,
            "depth_set": sp.depth_set, "heading_set": sp.heading_set,
            "link": {
                "next_slot_in": self.link.next_slot_time - self.t,
                "last_byte": self.link.last_sent,
                "pending": self.link.pending,
            },
        }
