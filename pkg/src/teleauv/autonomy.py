"""Onboard shared-autonomy layer: setpoint tracking from 1-byte commands.

The fish holds the last commanded desired state and closes the fast loops
locally: a PID on pressure depth outputs vertical force F_z, a cascade
(proportional heading -> desired yaw rate -> PID on gyro rate) outputs yaw
moment M_z, and surge force F_x is applied open loop because the vehicle has
no speed or position sensing. The three demands are then allocated to the
vertical motor and the left/right planar motor pair.

Heading control lives entirely in the sensor frame: with a constant
magnetometer bias the loop still converges, it just parks the true yaw at
(setpoint - bias). That is exactly why biased pool magnetometers remain
usable as a reference.
"""

import math
from dataclasses import dataclass

from . import codec
from .angles import wrap_2pi, wrap_pi
from .codec import Command
from .link import Delivery
from .vehicle import SensorReading


@dataclass(frozen=True, slots=True)
class Setpoints:
    depth_set: float = 0.0        # m, positive down
    heading_set: float = 0.0      # rad, sensor frame, [0, 2*pi)
    surge_force_set: float = 0.0  # N, one of the 5 quantized levels


@dataclass(frozen=True, slots=True)
class PidGains:
    kp: float = 0.0
    ki: float = 0.0
    kd: float = 0.0
    integral_limit: float = 1.0  # clamp on the integral term (anti-windup)
    output_limit: float = 1.0    # clamp on the controller output

    def validate(self) -> "PidGains":
        if min(self.kp, self.ki, self.kd) < 0.0:
            raise ValueError("PID gains must be >= 0")
        if self.integral_limit <= 0.0 or self.output_limit <= 0.0:
            raise ValueError("PID limits must be > 0")
        return self


@dataclass(frozen=True, slots=True)
class ControlGains:
    """Gain set for both loops; defaults tuned against the step-response targets."""

    depth: PidGains = PidGains(kp=20.0, ki=2.0, kd=10.0, integral_limit=1.0, output_limit=2.0)
    heading_outer_kp: float = 2.0   # 1/s, heading error -> desired yaw rate
    max_turn_rate: float = 1.0      # rad/s clamp on the desired yaw rate
    heading_rate: PidGains = PidGains(kp=0.5, ki=0.05, kd=0.0, integral_limit=0.15, output_limit=0.3)


@dataclass(frozen=True, slots=True)
class AllocationConfig:
    lateral_offset: float = 0.08   # m, planar motor arm used by the allocator
    max_motor_thrust: float = 2.0  # N per motor
    surge_slow: float = 0.5        # N, slow-forward/slow-back magnitude
    surge_max: float = 1.5         # N, forward/back magnitude
    depth_step: float = 0.025      # m per depth increment command

    def validate(self) -> "AllocationConfig":
        if self.lateral_offset <= 0.0:
            raise ValueError("lateral_offset must be > 0")
        if not 0.0 < self.surge_slow < self.surge_max <= 2.0 * self.max_motor_thrust:
            raise ValueError("need 0 < surge_slow < surge_max <= 2 * max_motor_thrust")
        if self.depth_step <= 0.0:
            raise ValueError("depth_step must be > 0")
        return self

    def surge_force(self, thrust_state: int) -> float:
        """Map a quantized thrust state to open-loop surge force in newtons."""
        table = (-self.surge_max, -self.surge_slow, 0.0, self.surge_slow, self.surge_max)
        return table[thrust_state]


@dataclass(frozen=True, slots=True)
class ControlOutput:
    f_x: float  # N, open-loop surge demand
    f_z: float  # N, vertical demand
    m_z: float  # N m, yaw moment demand


@dataclass(frozen=True, slots=True)
class MotorThrusts:
    t_vertical: float  # N
    t_left: float      # N
    t_right: float     # N


def apply_command(setpoints: Setpoints, cmd: Command, cfg: AllocationConfig,
                  pool_depth: float) -> Setpoints:
    """Fold one received command into the desired state.

    Heading and surge are absolute; depth moves by one step per message,
    "lower" sinking (+z) and "raise" surfacing (-z), clamped to the pool.
    """
    cmd.validate()
    depth = setpoints.depth_set + (1 - cmd.depth_inc) * cfg.depth_step
    depth = min(max(depth, 0.0), pool_depth)
    return Setpoints(
        depth_set=depth,
        heading_set=wrap_2pi(math.radians(codec.heading_of(cmd.heading_idx))),
        surge_force_set=cfg.surge_force(cmd.thrust_state),
    )


class Pid:
    """Textbook PID with anti-windup: clamped integral term, clamped output,
    and no integration while the output is saturated in the error's direction."""

    def __init__(self, gains: PidGains):
        self.gains = gains.validate()
        self.integral = 0.0
        self._prev_error: float | None = None

    def reset(self) -> None:
        self.integral = 0.0
        self._prev_error = None

    def update(self, error: float, dt: float) -> float:
        g = self.gains
        derivative = 0.0 if self._prev_error is None else (error - self._prev_error) / dt
        self._prev_error = error
        unclamped = g.kp * error + self.integral + g.kd * derivative
        pushing_deeper = ((unclamped >= g.output_limit and error > 0.0)
                          or (unclamped <= -g.output_limit and error < 0.0))
        if not pushing_deeper:
            self.integral = _clamp(self.integral + g.ki * error * dt,
                                   -g.integral_limit, g.integral_limit)
        return _clamp(g.kp * error + self.integral + g.kd * derivative,
                      -g.output_limit, g.output_limit)


def depth_controller(depth_meas: float, depth_set: float, pid: Pid, dt: float,
                     buoyancy_feedforward: float = 0.0) -> float:
    """Vertical force demand from the depth loop (plus trim feed-forward)."""
    return pid.update(depth_set - depth_meas, dt) + buoyancy_feedforward


def heading_controller(heading_meas: float, yaw_rate_meas: float, heading_set: float,
                       outer_kp: float, max_turn_rate: float, rate_pid: Pid, dt: float) -> tuple[float, float]:
    """Yaw moment demand from the cascade; returns (m_z, desired_rate).

    Outer loop: proportional on the shortest-angle heading error, clamped to
    the turn-rate limit. Inner loop: PID on the gyro rate error.
    """
    r_des = _clamp(outer_kp * wrap_pi(heading_set - heading_meas), -max_turn_rate, max_turn_rate)
    return rate_pid.update(r_des - yaw_rate_meas, dt), r_des


def allocate(out: ControlOutput, cfg: AllocationConfig) -> MotorThrusts:
    """Map (F_x, F_z, M_z) demands onto the three motors.

    T_vertical = F_z; T_left = F_x/2 - M_z/(2l); T_right = F_x/2 + M_z/(2l).
    When a planar motor would saturate, the surge share is reduced first so
    the yaw moment survives as far as possible, then the moment itself is
    scaled; heading authority matters more than speed.
    """
    tmax = cfg.max_motor_thrust
    half_moment = out.m_z / (2.0 * cfg.lateral_offset)
    if abs(half_moment) > tmax:
        half_moment = math.copysign(tmax, half_moment)
    headroom = tmax - abs(half_moment)
    half_surge = _clamp(out.f_x / 2.0, -headroom, headroom)

    return MotorThrusts(
        t_vertical=_clamp(out.f_z, -tmax, tmax),
        t_left=_clamp(half_surge - half_moment, -tmax, tmax),
        t_right=_clamp(half_surge + half_moment, -tmax, tmax),
    )


def motor_command(thrust: float, max_thrust: float) -> float:
    """Normalized motor command in [-1, 1] for a thrust demand (sqrt map)."""
    t = _clamp(thrust, -max_thrust, max_thrust)
    return math.copysign(math.sqrt(abs(t) / max_thrust), t)


def thrust_from_command(command: float, max_thrust: float) -> float:
    """Inverse of motor_command: thrust produced by a normalized command."""
    c = _clamp(command, -1.0, 1.0)
    return math.copysign(c * c * max_thrust, c)


@dataclass(slots=True)
class TickDebug:
    """Controller internals exported per tick for logging and plotting."""

    depth_error: float = 0.0
    depth_integral: float = 0.0
    heading_error: float = 0.0
    r_des: float = 0.0
    f_x: float = 0.0
    f_z: float = 0.0
    m_z: float = 0.0


class OnboardController:
    """The fish-side control stack, advanced once per simulation step.

    Decodes newly arrived bytes (already stale-filtered by the receiver),
    updates the setpoints, runs both loops on the current sensor sample and
    allocates motor thrusts. Between messages the last setpoints persist.
    """

    def __init__(self, gains: ControlGains, allocation: AllocationConfig, pool_depth: float,
                 initial: Setpoints, buoyancy_feedforward: float = 0.0):
        self.gains = gains
        self.allocation = allocation.validate()
        self.pool_depth = pool_depth
        self.setpoints = initial
        self.buoyancy_feedforward = buoyancy_feedforward
        self.depth_pid = Pid(gains.depth)
        self.rate_pid = Pid(gains.heading_rate)
        self.debug = TickDebug()
        self.applied: list[Delivery] = []   # deliveries executed on the last tick
        self.rejected: list[Delivery] = []  # corrupt bytes ignored on the last tick

    def tick(self, arrivals: list[Delivery], sensors: SensorReading, dt: float) -> MotorThrusts:
        self.applied = []
        self.rejected = []
        for d in arrivals:
            try:
                cmd = codec.decode(d.byte)
            except codec.InvalidByteError:
                self.rejected.append(d)
                continue
            self.setpoints = apply_command(self.setpoints, cmd, self.allocation, self.pool_depth)
            self.applied.append(d)

        sp = self.setpoints
        f_z = depth_controller(sensors.depth_meas, sp.depth_set, self.depth_pid, dt,
                               self.buoyancy_feedforward)
        m_z, r_des = heading_controller(sensors.heading_meas, sensors.yaw_rate_meas, sp.heading_set,
                                        self.gains.heading_outer_kp, self.gains.max_turn_rate,
                                        self.rate_pid, dt)
        out = ControlOutput(f_x=sp.surge_force_set, f_z=f_z, m_z=m_z)

        self.debug = TickDebug(
            depth_error=sp.depth_set - sensors.depth_meas,
            depth_integral=self.depth_pid.integral,
            heading_error=wrap_pi(sp.heading_set - sensors.heading_meas),
            r_des=r_des,
            f_x=out.f_x, f_z=out.f_z, m_z=out.m_z,
        )
        return allocate(out, self.allocation)


def _clamp(v: float, lo: float, hi: float) -> float:
    return lo if v < lo else hi if v > hi else v
