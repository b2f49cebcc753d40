"""Reduced-DOF dynamics of the robotic fish plus its onboard sensor models.

State is 4-DOF: planar position (x east, y north), depth z (positive down)
and compass yaw psi (0 = North, clockwise positive), with body velocities
surge u, heave w and yaw rate r. Sway is identically zero: the fish has two
planar thrusters and one vertical thruster, so it can force surge, heave and
yaw but nothing lateral. Water currents advect the vehicle in the world
frame, so cross-track drift still appears.

Integration is semi-implicit Euler at a fixed step (default 0.01 s):
velocities first from current-state forces, then kinematics with the new
velocities. Drag is linear + quadratic per axis. Pool walls clamp position
and zero the corresponding velocity (no bounce).

Default drag coefficients give roughly 0.55 m/s cruise at full forward
thrust (1.5 N) and a ~5 s half-turn with the default heading gains, which is
the speed class implied by the benchmark course times.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from .angles import wrap_2pi


class NumericalDivergenceError(RuntimeError):
    """Integration produced a non-finite state; the run must halt."""


@dataclass(frozen=True, slots=True)
class VehicleParams:
    mass: float = 4.0              # kg
    length: float = 0.45           # m
    yaw_inertia: float = 0.02      # kg m^2
    d_u1: float = 0.5              # N s/m, linear surge drag
    d_u2: float = 4.0              # N s^2/m^2, quadratic surge drag
    d_w1: float = 2.0              # N s/m, linear heave drag
    d_w2: float = 8.0              # N s^2/m^2, quadratic heave drag
    d_r1: float = 0.05             # N m s/rad, linear yaw drag
    d_r2: float = 0.05             # N m s^2/rad^2, quadratic yaw drag
    max_motor_thrust: float = 2.0  # N per motor, physical clamp
    motor_offset: float = 0.08     # m, planar motor lever arm about the yaw axis
    buoyancy_residual: float = 0.0  # N, +down; 0 = neutrally trimmed

    def validate(self) -> "VehicleParams":
        if self.mass <= 0.0 or self.yaw_inertia <= 0.0:
            raise ValueError("mass and yaw_inertia must be > 0")
        if min(self.d_u1, self.d_u2, self.d_w1, self.d_w2, self.d_r1, self.d_r2) < 0.0:
            raise ValueError("drag coefficients must be >= 0")
        if self.max_motor_thrust <= 0.0 or self.motor_offset <= 0.0:
            raise ValueError("max_motor_thrust and motor_offset must be > 0")
        return self


@dataclass(frozen=True, slots=True)
class VehicleState:
    x: float = 0.0    # m east, pool frame
    y: float = 0.0    # m north
    z: float = 0.0    # m, positive down
    psi: float = 0.0  # rad compass yaw in [0, 2*pi)
    u: float = 0.0    # m/s surge
    w: float = 0.0    # m/s heave (+down)
    r: float = 0.0    # rad/s yaw rate (CW positive)
    t: float = 0.0    # s


@dataclass(frozen=True, slots=True)
class MagneticAnomaly:
    """Time-invariant magnetometer heading distortion (steel pool walls)."""

    constant_bias: float = 0.0                      # rad added to true yaw
    spatial_gradient: tuple[float, float] = (0.0, 0.0)  # rad/m along (x, y)


@dataclass(frozen=True, slots=True)
class Environment:
    pool_x: float = 12.5   # m, long axis
    pool_y: float = 8.0    # m
    pool_z: float = 2.1    # m depth
    current: tuple[float, float] = (0.0, 0.0)  # m/s world-frame (x, y)
    water_density: float = 1000.0              # kg/m^3
    sigma_depth: float = 0.01      # m, pressure-depth noise
    sigma_heading: float = 0.035   # rad, magnetometer noise
    sigma_yaw_rate: float = 0.01   # rad/s, gyro noise
    rng_seed: int = 0

    def validate(self) -> "Environment":
        if min(self.pool_x, self.pool_y, self.pool_z) <= 0.0:
            raise ValueError("pool dimensions must be > 0")
        if min(self.sigma_depth, self.sigma_heading, self.sigma_yaw_rate) < 0.0:
            raise ValueError("noise sigmas must be >= 0")
        return self


@dataclass(frozen=True, slots=True)
class SensorReading:
    depth_meas: float     # m
    heading_meas: float   # rad in [0, 2*pi), sensor frame (true yaw + anomaly + noise)
    yaw_rate_meas: float  # rad/s


def step(state: VehicleState, thrusts, env: Environment, params: VehicleParams, dt: float) -> VehicleState:
    """Advance the vehicle one fixed step under the given motor thrusts.

    thrusts carries (t_vertical, t_left, t_right) in newtons; body forces are
    recovered with the motor geometry: F_x = T_l + T_r, M_z = l*(T_r - T_l),
    F_z = T_v. Raises NumericalDivergenceError if the state leaves the reals.
    """
    tmax = params.max_motor_thrust
    t_v = _clamp(thrusts.t_vertical, -tmax, tmax)
    t_l = _clamp(thrusts.t_left, -tmax, tmax)
    t_r = _clamp(thrusts.t_right, -tmax, tmax)

    f_x = t_l + t_r
    f_z = t_v + params.buoyancy_residual
    m_z = params.motor_offset * (t_r - t_l)

    # velocity update from current-state forces
    u = state.u + dt * (f_x - params.d_u1 * state.u - params.d_u2 * state.u * abs(state.u)) / params.mass
    w = state.w + dt * (f_z - params.d_w1 * state.w - params.d_w2 * state.w * abs(state.w)) / params.mass
    r = state.r + dt * (m_z - params.d_r1 * state.r - params.d_r2 * state.r * abs(state.r)) / params.yaw_inertia

    # kinematics with the updated velocities (semi-implicit)
    psi = wrap_2pi(state.psi + dt * r)
    x = state.x + dt * (u * math.sin(psi) + env.current[0])
    y = state.y + dt * (u * math.cos(psi) + env.current[1])
    z = state.z + dt * w

    # pool boundary: clamp and kill the velocity driving into the wall
    if x < 0.0 or x > env.pool_x:
        x = _clamp(x, 0.0, env.pool_x)
        u = 0.0
    if y < 0.0 or y > env.pool_y:
        y = _clamp(y, 0.0, env.pool_y)
        u = 0.0
    if z < 0.0 or z > env.pool_z:
        z = _clamp(z, 0.0, env.pool_z)
        w = 0.0

    if not all(map(math.isfinite, (x, y, z, psi, u, w, r))):
        raise NumericalDivergenceError(f"non-finite state at t={state.t + dt:.3f}")

    return replace(state, x=x, y=y, z=z, psi=psi, u=u, w=w, r=r, t=state.t + dt)


def sense(state: VehicleState, anomaly: MagneticAnomaly, env: Environment,
          rng: np.random.Generator) -> SensorReading:
    """Produce one sensor sample: pressure depth, biased magnetometer, gyro.

    Always draws exactly three normals so the noise stream depends only on
    the seed and the call index, not on which sigmas happen to be zero.
    """
    n = rng.standard_normal(3)
    gx, gy = anomaly.spatial_gradient
    return SensorReading(
        depth_meas=state.z + env.sigma_depth * n[0],
        heading_meas=wrap_2pi(state.psi + anomaly.constant_bias + gx * state.x + gy * state.y
                              + env.sigma_heading * n[1]),
        yaw_rate_meas=state.r + env.sigma_yaw_rate * n[2],
    )


def kinetic_energy(state: VehicleState, params: VehicleParams) -> float:
    """Body kinetic energy in joules; dissipation checks use this."""
    return 0.5 * (params.mass * state.u ** 2 + params.mass * state.w ** 2
                  + params.yaw_inertia * state.r ** 2)


def _clamp(v: float, lo: float, hi: float) -> float:
    return lo if v < lo else hi if v > hi else v
