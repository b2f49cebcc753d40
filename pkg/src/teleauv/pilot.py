"""Scripted operator standing in for the poolside human during headless runs.

The pilot watches the true simulator state (the human navigated by sight)
and emits one quantized command per joystick sample. It is deliberately
greedy, no path planning: pick an aim point from the vehicle's position
relative to the next gate, command the nearest cardinal heading toward it,
and push forward only when roughly aligned. Anything smarter would mask the
channel and controller deficiencies the benchmark exists to expose.

Commands take a transmission slot plus the acoustic delay to bite, so the
vehicle can coast more than a meter past any decision point. The aim points
are therefore shaped as a funnel whose waypoints all sit well away from the
gate plane: converge onto the gate axis at a staging distance upstream,
commit straight through only once laterally lined up, retreat wide if close
to the plane while off-axis, and when stuck on the far side of an unpassed
gate, first clear the aperture corridor sideways and then loop back around.
The pilot also parks upstream until the accumulated depth increments have
brought the vehicle level with the aperture (descend first, thread second,
the way the human flew the course).
"""

import math
from dataclasses import dataclass

from .angles import bearing, wrap_pi
from .codec import (DEPTH_HOLD, DEPTH_LOWER, DEPTH_RAISE, THRUST_FORWARD, THRUST_SLOW_FORWARD,
                    THRUST_STOP, Command, heading_of, nearest_heading_idx)
from .mission import Gate
from .vehicle import VehicleState


@dataclass(frozen=True, slots=True)
class PilotConfig:
    input_rate: float = 10.0              # Hz, joystick sampling
    alignment_tolerance: float = math.radians(11.25)  # rad, half a cardinal sector
    approach_slow_radius: float = 1.0     # m, creep this close to the gate
    depth_deadband: float = 0.05          # m, no depth command inside this band
    approach_offset: float = 2.0          # m, staging point this far upstream of the gate
    through_offset: float = 0.3           # m, final aim point past the gate plane
    retreat_zone: float = 1.0             # m, plane distance that forces a retreat when off-axis
    staging_capture: float = 0.9          # m, reaching the staging point this close releases the run
    depth_gate_hold: float = 0.15         # m, park until the depth error is below this
    depth_hold_zone: float = 2.5          # m, plane distance where the depth park applies
    clear_margin: float = 0.3             # m, lateral clearance beyond the near-miss zone
    swing_reach: float = 2.0              # m, sideways carrot distance when escaping

    def validate(self) -> "PilotConfig":
        if self.input_rate <= 0.0:
            raise ValueError("input_rate must be > 0")
        if min(self.alignment_tolerance, self.approach_slow_radius, self.depth_deadband,
               self.approach_offset, self.through_offset, self.retreat_zone,
               self.staging_capture, self.depth_gate_hold, self.depth_hold_zone,
               self.clear_margin, self.swing_reach) <= 0.0:
            raise ValueError("pilot tolerances must be > 0")
        return self


def decide(state: VehicleState, next_gate: Gate, cfg: PilotConfig = PilotConfig()) -> Command:
    """One joystick sample: where to point, how hard to push, which way in depth."""
    gx, gy, gz = next_gate.center
    nx, ny = next_gate.normal
    tx, ty = -ny, nx
    s = next_gate.plane_offset(state.x, state.y)
    lat = next_gate.lateral_offset(state.x, state.y)
    half_w, _ = next_gate.shape.half_extents()
    corridor = 2.0 * half_w + cfg.clear_margin  # stay out of the near-miss zone
    sgn = math.copysign(1.0, lat) if lat != 0.0 else 1.0

    stage_x = gx - cfg.approach_offset * nx
    stage_y = gy - cfg.approach_offset * ny
    dist_stage = math.hypot(stage_x - state.x, stage_y - state.y)

    if s > 0.05:
        # wrong side of an unpassed gate
        if abs(lat) < corridor:
            # clear the aperture corridor sideways first (carrot moves with us)
            aim_x = state.x + sgn * cfg.swing_reach * tx
            aim_y = state.y + sgn * cfg.swing_reach * ty
        else:
            # loop around the plane to a point beside the upstream staging spot
            aim_x = stage_x + sgn * corridor * tx
            aim_y = stage_y + sgn * corridor * ty
    elif abs(lat) <= 0.8 * half_w or dist_stage <= cfg.staging_capture:
        # lined up (or staged on the axis): commit straight through
        aim_x = gx + cfg.through_offset * nx
        aim_y = gy + cfg.through_offset * ny
    elif s > -cfg.retreat_zone:
        # close to the plane but off the aperture: retreat wide and upstream
        aim_x = stage_x + sgn * corridor * tx
        aim_y = stage_y + sgn * corridor * ty
    else:
        # converge onto the gate axis at the staging distance
        aim_x, aim_y = stage_x, stage_y

    heading_idx = nearest_heading_idx(bearing(aim_x - state.x, aim_y - state.y))

    depth_err = gz - state.z  # +ve: gate is deeper
    if depth_err > cfg.depth_deadband:
        depth_inc = DEPTH_LOWER
    elif depth_err < -cfg.depth_deadband:
        depth_inc = DEPTH_RAISE
    else:
        depth_inc = DEPTH_HOLD

    heading_err = wrap_pi(math.radians(heading_of(heading_idx)) - state.psi)
    depth_ready = abs(depth_err) <= cfg.depth_gate_hold
    dist_gate = math.hypot(gx - state.x, gy - state.y)
    dist_aim = math.hypot(aim_x - state.x, aim_y - state.y)
    if abs(heading_err) >= cfg.alignment_tolerance:
        thrust = THRUST_STOP
    elif not depth_ready and -cfg.depth_hold_zone < s <= 0.05:
        thrust = THRUST_STOP  # park upstream until the depth increments catch up
    elif min(dist_gate, dist_aim) <= cfg.approach_slow_radius:
        thrust = THRUST_SLOW_FORWARD  # creep near the gate or near the current carrot
    else:
        thrust = THRUST_FORWARD

    return Command(heading_idx=heading_idx, thrust_state=thrust, depth_inc=depth_inc)
