"""Deterministic test-bed for an acoustically teleoperated underwater vehicle.

Reproduces the single-byte teleoperation stack end to end: command
quantization codec, slotted lossy/delayed acoustic link, onboard depth and
heading autonomy with thrust allocation, reduced-DOF fish dynamics, and the
4-gate pool mission benchmark with its communication statistics. Runs
headless with a scripted pilot or live behind a websocket for a human
operator console.
"""

from .autonomy import (AllocationConfig, ControlGains, ControlOutput, MotorThrusts,
                       OnboardController, PidGains, Setpoints, allocate, apply_command)
from .codec import Command, InvalidByteError, InvalidCommandError, decode, encode, heading_of
from .link import AcousticLink, Delivery, LinkConfig, StaleFilter, Transmission
from .mission import (CircleShape, CommStats, Crossing, Gate, MissionLog, MissionResult,
                      RectShape, comm_stats, detect_crossing, read_log, score, write_log)
from .pilot import PilotConfig, decide
from .runner import SimDriver
from .scenario import (Scenario, ScenarioError, StartPose, bundled_scenario_path,
                       load_scenario, resolve_scenario, save_scenario)
from .vehicle import (Environment, MagneticAnomaly, NumericalDivergenceError, SensorReading,
                      VehicleParams, VehicleState, sense, step)

__version__ = "0.1.0"
