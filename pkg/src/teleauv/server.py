"""Websocket service between the simulation loop and the operator console.

All frames are JSON text messages. Server -> console:

    {"type": "telemetry", t, x, y, z, psi, depth_set, heading_set,
     "link": {next_slot_in, last_byte, pending}}        every 0.1 s sim time
    {"type": "event", "kind": ..., "detail": {...}}     scenario on connect,
                                                        transmissions, command
                                                        applications, gate and
                                                        mission events
    {"type": "summary", "mission": {...}, "comm": {...}} once at run end
    {"type": "error", "detail": "..."}                  protocol violations

Console -> server:

    {"type": "command", "heading_idx": 0..15, "thrust_state": 0..4,
     "depth_inc": 0..2}

The simulation task owns all mutable state; connection handlers only enqueue
validated commands onto it, so no locking is needed. Exactly one connection
may act as the command source (the first one that sends a command); commands
from anyone else, or any command while the scripted pilot is driving, get an
error frame but the connection stays usable as an observer.
"""

import asyncio
import json
import math
import threading
import time
from typing import Optional

from websockets.asyncio.server import broadcast, serve as ws_serve

from .codec import Command, InvalidCommandError
from .pilot import PilotConfig
from .runner import SimDriver
from .scenario import Scenario

TELEMETRY_PERIOD = 0.1  # s of simulated time between telemetry frames


class GatewayService:
    def __init__(self, scenario: Scenario, *, time_scale: float = 1.0,
                 pilot_mode: str = SimDriver.PILOT_EXTERNAL,
                 master_seed: int | None = None,
                 pilot_cfg: PilotConfig | None = None,
                 out_dir=None):
        if time_scale <= 0.0:
            raise ValueError("time_scale must be > 0")
        self.driver = SimDriver(scenario, master_seed=master_seed,
                                pilot_mode=pilot_mode, pilot_cfg=pilot_cfg)
        self.scenario = scenario
        self.time_scale = time_scale
        self.pilot_mode = pilot_mode
        self.out_dir = out_dir
        self.connections: set = set()
        self.command_owner = None
        self.port: Optional[int] = None
        self._summary_sent = False
        self._events_sent = 0
        self._tx_sent = 0
        self._next_telemetry = 0.0

    # -- wire helpers --------------------------------------------------------

    def _broadcast(self, frame: dict) -> None:
        if self.connections:
            broadcast(self.connections, json.dumps(frame))

    def _scenario_frame(self) -> dict:
        scn = self.scenario
        # progress snapshot makes reconnecting consoles whole without replay
        fails: dict[int, int] = {}
        passed: dict[int, bool] = {}
        for ev in self.driver.log.gate_events():
            if ev.kind == "gate_pass":
                passed[ev.ref] = True
            else:
                fails[ev.ref] = fails.get(ev.ref, 0) + 1
        return {
            "type": "event",
            "kind": "scenario",
            "detail": {
                "name": scn.name,
                "pool": [scn.environment.pool_x, scn.environment.pool_y, scn.environment.pool_z],
                "gates": [{
                    "id": g.id, "order": g.order, "center": list(g.center),
                    "normal": list(g.normal),
                    "shape": ({"kind": "circle", "radius": g.shape.radius}
                              if hasattr(g.shape, "radius") else
                              {"kind": "rectangle", "width": g.shape.width, "height": g.shape.height}),
                    "failed_attempts": fails.get(g.id, 0),
                    "passed": passed.get(g.id, False),
                } for g in self.driver.gates],
                "start_pose": {"x": scn.start_pose.x, "y": scn.start_pose.y,
                               "z": scn.start_pose.z, "yaw": scn.start_pose.yaw},
                "slot_interval": scn.link.slot_interval,
                "time_limit": scn.time_limit,
                "time_scale": self.time_scale,
                "pilot_mode": self.pilot_mode,
            },
        }

    def _pump_outputs(self) -> None:
        """Broadcast everything new since the last pump."""
        log = self.driver.log
        for ev in log.events[self._events_sent:]:
            self._broadcast({"type": "event", "kind": ev.kind,
                             "detail": {"t": ev.t, "ref": ev.ref, "note": ev.detail}})
        self._events_sent = len(log.events)

        records = self.driver.link.records
        for rec in records[self._tx_sent:]:
            self._broadcast({"type": "event", "kind": "transmit",
                             "detail": {"t": rec.t_sent, "seq": rec.seq,
                                        "byte": rec.byte, "lost": rec.lost}})
        self._tx_sent = len(records)

        if self.driver.t >= self._next_telemetry:
            # sampling stream: one frame with the freshest state, never a backlog
            self._broadcast(self.driver.telemetry())
            self._next_telemetry = (math.floor(self.driver.t / TELEMETRY_PERIOD) + 1) * TELEMETRY_PERIOD

    # -- simulation task -------------------------------------------------------

    async def _sim_loop(self) -> None:
        wall_start = time.monotonic()
        self._pump_outputs()  # initial telemetry at t=0
        while not self.driver.done:
            due = (time.monotonic() - wall_start) * self.time_scale
            ticks = 0
            while not self.driver.done and self.driver.t < due and ticks < 2000:
                self.driver.tick()
                ticks += 1
            self._pump_outputs()
            await asyncio.sleep(0.002 if ticks else 0.005)

        if not self._summary_sent:
            self._summary_sent = True
            summary = self.driver.summary()
            if self.out_dir is not None:
                self.driver.write_logs(self.out_dir)
            self._broadcast({"type": "summary",
                             "mission": summary["mission"], "comm": summary["comm"]})

    # -- connection handling ---------------------------------------------------

    async def handler(self, conn) -> None:
        self.connections.add(conn)
        try:
            await conn.send(json.dumps(self._scenario_frame()))
            await conn.send(json.dumps(self.driver.telemetry()))
            async for message in conn:
                await self._handle_message(conn, message)
        finally:
            self.connections.discard(conn)
            if self.command_owner is conn:
                self.command_owner = None

    async def _handle_message(self, conn, message) -> None:
        try:
            frame = json.loads(message)
        except (json.JSONDecodeError, UnicodeDecodeError):
            await conn.send(json.dumps({"type": "error", "detail": "frame is not valid JSON"}))
            return
        if not isinstance(frame, dict) or frame.get("type") != "command":
            await conn.send(json.dumps({"type": "error",
                                        "detail": f"unknown frame type {frame.get('type') if isinstance(frame, dict) else None!r}"}))
            return
        if self.pilot_mode != SimDriver.PILOT_EXTERNAL:
            await conn.send(json.dumps({"type": "error",
                                        "detail": "command source is the scripted pilot"}))
            return
        if self.command_owner is None:
            self.command_owner = conn
        elif self.command_owner is not conn:
            await conn.send(json.dumps({"type": "error",
                                        "detail": "another connection already owns the command source"}))
            return
        try:
            cmd = Command(heading_idx=frame["heading_idx"],
                          thrust_state=frame["thrust_state"],
                          depth_inc=frame["depth_inc"]).validate()
        except (KeyError, TypeError, InvalidCommandError) as e:
            await conn.send(json.dumps({"type": "error", "detail": f"bad command: {e}"}))
            return
        self.driver.inject_command(cmd)

    # -- lifecycle ---------------------------------------------------------------

    async def run(self, host: str, port: int, stop: asyncio.Event,
                  on_ready=None) -> None:
        async with ws_serve(self.handler, host, port) as server:
            self.port = server.sockets[0].getsockname()[1]
            if on_ready is not None:
                on_ready(self.port)
            sim = asyncio.create_task(self._sim_loop())
            try:
                await stop.wait()
            finally:
                sim.cancel()


def serve(scenario: Scenario, host: str = "127.0.0.1", port: int = 8765,
          time_scale: float = 1.0, pilot_mode: str = SimDriver.PILOT_EXTERNAL,
          master_seed: int | None = None, out_dir=None) -> None:
    """Blocking CLI entry: serve until interrupted."""
    service = GatewayService(scenario, time_scale=time_scale, pilot_mode=pilot_mode,
                             master_seed=master_seed, out_dir=out_dir)

    async def _main() -> None:
        stop = asyncio.Event()

        def ready(p: int) -> None:
            print(f"teleauv gateway listening on ws://{host}:{p} "
                  f"(pilot={pilot_mode}, x{time_scale:g})", flush=True)

        await service.run(host, port, stop, on_ready=ready)

    try:
        asyncio.run(_main())
    except KeyboardInterrupt:
        pass


class ServerThread:
    """Run a GatewayService on a background thread; for tests and tooling."""

    def __init__(self, scenario: Scenario, **kwargs):
        self.service = GatewayService(scenario, **kwargs)
        self._loop: Optional[asyncio.AbstractEventLoop] = None
        self._stop: Optional[asyncio.Event] = None
        self._thread: Optional[threading.Thread] = None
        self._port_ready = threading.Event()

    def start(self) -> int:
        def runner() -> None:
            async def _main() -> None:
                self._loop = asyncio.get_running_loop()
                self._stop = asyncio.Event()
                await self.service.run("127.0.0.1", 0, self._stop,
                                       on_ready=lambda p: self._port_ready.set())

            asyncio.run(_main())

        self._thread = threading.Thread(target=runner, daemon=True)
        self._thread.start()
        if not self._port_ready.wait(timeout=10.0):
            raise RuntimeError("gateway server did not start")
        assert self.service.port is not None
        return self.service.port

    def stop(self) -> None:
        if self._loop is not None and self._stop is not None:
            self._loop.call_soon_threadsafe(self._stop.set)
        if self._thread is not None:
            self._thread.join(timeout=10.0)
