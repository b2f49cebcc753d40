"""Scenario files: the complete configuration of one benchmark run.

A scenario bundles pool/environment, vehicle physics, allocation geometry,
controller gains, channel parameters, the gate course, the start pose and
the time limit into a single JSON document (all SI units, explicit RNG
seeds). Files are validated against the JSON schema shipped with the
package (scenario.schema.json) plus semantic checks the schema cannot
express: gates must fit inside the pool and their order values must form
1..N. Unknown fields are rejected so typos fail loudly.

Bundled scenarios (currently `pool_4gate`) can be referenced by bare name.
"""

import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import jsonschema

from .autonomy import AllocationConfig, ControlGains, PidGains
from .link import LinkConfig
from .mission import CircleShape, Gate, RectShape
from .vehicle import Environment, MagneticAnomaly, VehicleParams


class ScenarioError(ValueError):
    """A scenario file is malformed or violates an invariant."""


@dataclass(frozen=True, slots=True)
class StartPose:
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0
    yaw: float = 0.0  # rad, compass


@dataclass(frozen=True, slots=True)
class Scenario:
    name: str
    environment: Environment
    anomaly: MagneticAnomaly
    vehicle: VehicleParams
    allocation: AllocationConfig
    gains: ControlGains
    link: LinkConfig
    gates: list[Gate]
    start_pose: StartPose
    time_limit: float           # s
    dt: float = 0.01            # s, fixed simulation step
    log_decimation: int = 10    # state row every N ticks


def _schema() -> dict:
    with resources.files("teleauv").joinpath("scenario.schema.json").open() as f:
        return json.load(f)


def bundled_scenario_path(name: str) -> Path:
    """Filesystem path of a scenario shipped with the package."""
    p = resources.files("teleauv").joinpath(f"scenarios/{name}.json")
    if not p.is_file():
        raise ScenarioError(f"no bundled scenario named {name!r}")
    return Path(str(p))


def resolve_scenario(ref: str) -> Path:
    """Interpret a CLI scenario reference: a file path or a bundled name."""
    p = Path(ref)
    if p.exists():
        return p
    if "/" not in ref and not ref.endswith(".json"):
        return bundled_scenario_path(ref)
    raise ScenarioError(f"scenario file not found: {ref}")


def load_scenario(path) -> Scenario:
    """Parse and validate a scenario JSON file."""
    path = Path(path)
    try:
        with open(path) as f:
            raw = json.load(f)
    except json.JSONDecodeError as e:
        raise ScenarioError(f"{path}: invalid JSON at line {e.lineno}: {e.msg}") from e

    validator = jsonschema.Draft202012Validator(_schema())
    errors = sorted(validator.iter_errors(raw), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        loc = "$" + "".join(f"[{p!r}]" if isinstance(p, str) else f"[{p}]" for p in e.absolute_path)
        raise ScenarioError(f"{path}: {loc}: {e.message}")

    try:
        return _from_raw(raw)
    except (ValueError, KeyError) as e:
        raise ScenarioError(f"{path}: {e}") from e


def save_scenario(scn: Scenario, path) -> None:
    """Serialize a scenario back to JSON (load(save(s)) == s)."""
    with open(path, "w") as f:
        json.dump(_to_raw(scn), f, indent=2)
        f.write("\n")


def _from_raw(raw: dict) -> Scenario:
    env_raw = dict(raw["environment"])
    anomaly_raw = env_raw.pop("anomaly", {})
    anomaly = MagneticAnomaly(
        constant_bias=anomaly_raw.get("constant_bias", 0.0),
        spatial_gradient=tuple(anomaly_raw.get("spatial_gradient", (0.0, 0.0))),
    )
    pool = env_raw.pop("pool")
    env = Environment(pool_x=pool[0], pool_y=pool[1], pool_z=pool[2],
                      current=tuple(env_raw.pop("current", (0.0, 0.0))), **env_raw).validate()

    vehicle = VehicleParams(**raw.get("vehicle", {})).validate()
    allocation = AllocationConfig(**raw.get("allocation", {})).validate()

    gains_raw = raw.get("gains", {})
    gains = ControlGains(
        depth=PidGains(**gains_raw["depth"]).validate() if "depth" in gains_raw else ControlGains().depth,
        heading_outer_kp=gains_raw.get("heading_outer_kp", ControlGains().heading_outer_kp),
        max_turn_rate=gains_raw.get("max_turn_rate", ControlGains().max_turn_rate),
        heading_rate=(PidGains(**gains_raw["heading_rate"]).validate()
                      if "heading_rate" in gains_raw else ControlGains().heading_rate),
    )

    link = LinkConfig(**raw.get("link", {})).validate()

    gates = [_gate_from_raw(g) for g in raw["gates"]]
    _check_gates(gates, env)

    sp = raw["start_pose"]
    start = StartPose(x=sp["x"], y=sp["y"], z=sp["z"], yaw=sp["yaw"])
    _check_inside_pool("start_pose", start.x, start.y, start.z, env)

    sim = raw.get("sim", {})
    return Scenario(
        name=raw["name"], environment=env, anomaly=anomaly, vehicle=vehicle,
        allocation=allocation, gains=gains, link=link, gates=gates, start_pose=start,
        time_limit=raw["time_limit"], dt=sim.get("dt", 0.01),
        log_decimation=sim.get("log_decimation", 10),
    )


def _gate_from_raw(g: dict) -> Gate:
    shp = g["shape"]
    if shp["kind"] == "circle":
        shape: CircleShape | RectShape = CircleShape(radius=shp["radius"])
    else:
        shape = RectShape(width=shp["width"], height=shp["height"])
    nx, ny = g["normal"]
    norm = math.hypot(nx, ny)
    if norm == 0.0:
        raise ScenarioError(f"gate {g['id']}: normal must be non-zero")
    return Gate(id=g["id"], center=tuple(g["center"]), normal=(nx / norm, ny / norm),
                shape=shape, order=g["order"])


def _check_gates(gates: list[Gate], env: Environment) -> None:
    if not gates:
        raise ScenarioError("scenario needs at least one gate")
    orders = sorted(g.order for g in gates)
    if orders != list(range(1, len(gates) + 1)):
        raise ScenarioError(f"gate order values must form 1..{len(gates)}, got {orders}")
    if len({g.id for g in gates}) != len(gates):
        raise ScenarioError("gate ids must be unique")
    for g in gates:
        half_w, half_h = g.shape.half_extents()
        tx, ty = -g.normal[1], g.normal[0]
        for s in (-1.0, 1.0):
            ex = g.center[0] + s * half_w * tx
            ey = g.center[1] + s * half_w * ty
            if not (0.0 <= ex <= env.pool_x and 0.0 <= ey <= env.pool_y):
                raise ScenarioError(f"gate {g.id}: aperture leaves the pool horizontally")
        if not (0.0 <= g.center[2] - half_h and g.center[2] + half_h <= env.pool_z):
            raise ScenarioError(f"gate {g.id}: aperture leaves the pool vertically")


def _check_inside_pool(what: str, x: float, y: float, z: float, env: Environment) -> None:
    if not (0.0 <= x <= env.pool_x and 0.0 <= y <= env.pool_y and 0.0 <= z <= env.pool_z):
        raise ScenarioError(f"{what} is outside the pool")


def _to_raw(scn: Scenario) -> dict:
    env = scn.environment
    raw = {
        "name": scn.name,
        "environment": {
            "pool": [env.pool_x, env.pool_y, env.pool_z],
            "current": list(env.current),
            "water_density": env.water_density,
            "sigma_depth": env.sigma_depth,
            "sigma_heading": env.sigma_heading,
            "sigma_yaw_rate": env.sigma_yaw_rate,
            "rng_seed": env.rng_seed,
            "anomaly": {
                "constant_bias": scn.anomaly.constant_bias,
                "spatial_gradient": list(scn.anomaly.spatial_gradient),
            },
        },
        "vehicle": {
            "mass": scn.vehicle.mass, "length": scn.vehicle.length,
            "yaw_inertia": scn.vehicle.yaw_inertia,
            "d_u1": scn.vehicle.d_u1, "d_u2": scn.vehicle.d_u2,
            "d_w1": scn.vehicle.d_w1, "d_w2": scn.vehicle.d_w2,
            "d_r1": scn.vehicle.d_r1, "d_r2": scn.vehicle.d_r2,
            "max_motor_thrust": scn.vehicle.max_motor_thrust,
            "motor_offset": scn.vehicle.motor_offset,
            "buoyancy_residual": scn.vehicle.buoyancy_residual,
        },
        "allocation": {
            "lateral_offset": scn.allocation.lateral_offset,
            "max_motor_thrust": scn.allocation.max_motor_thrust,
            "surge_slow": scn.allocation.surge_slow,
            "surge_max": scn.allocation.surge_max,
            "depth_step": scn.allocation.depth_step,
        },
        "gains": {
            "depth": _pid_to_raw(scn.gains.depth),
            "heading_outer_kp": scn.gains.heading_outer_kp,
            "max_turn_rate": scn.gains.max_turn_rate,
            "heading_rate": _pid_to_raw(scn.gains.heading_rate),
        },
        "link": {
            "slot_interval": scn.link.slot_interval,
            "loss_prob": scn.link.loss_prob,
            "delay_mean": scn.link.delay_mean,
            "delay_var": scn.link.delay_var,
            "delay_min": scn.link.delay_min,
            "rng_seed": scn.link.rng_seed,
            "send_mode": scn.link.send_mode,
        },
        "gates": [_gate_to_raw(g) for g in scn.gates],
        "start_pose": {"x": scn.start_pose.x, "y": scn.start_pose.y,
                       "z": scn.start_pose.z, "yaw": scn.start_pose.yaw},
        "time_limit": scn.time_limit,
        "sim": {"dt": scn.dt, "log_decimation": scn.log_decimation},
    }
    return raw


def _pid_to_raw(g: PidGains) -> dict:
    return {"kp": g.kp, "ki": g.ki, "kd": g.kd,
            "integral_limit": g.integral_limit, "output_limit": g.output_limit}


def _gate_to_raw(g: Gate) -> dict:
    if isinstance(g.shape, CircleShape):
        shape = {"kind": "circle", "radius": g.shape.radius}
    else:
        shape = {"kind": "rectangle", "width": g.shape.width, "height": g.shape.height}
    return {"id": g.id, "order": g.order, "center": list(g.center),
            "normal": list(g.normal), "shape": shape}
