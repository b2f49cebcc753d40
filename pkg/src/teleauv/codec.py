"""Single-byte command codec for the acoustic teleoperation channel.

The operator's desired state is quantized to three indices and packed into
one byte with a mixed-radix layout (heading major, depth minor):

    byte = heading_idx * 15 + thrust_state * 3 + depth_inc

    heading_idx   0..15   compass sector, 0 = sensor-frame North, 22.5 deg CW steps
    thrust_state  0..4    back, slow-back, stop, slow-forward, forward
    depth_inc     0..2    lower (sink), hold, raise (surface-ward)

16 * 5 * 3 = 240 combinations fit codes 0..239; 240..255 stay reserved so a
receiver can tell a corrupt byte from a valid command.
"""

import math
from dataclasses import dataclass

HEADING_COUNT = 16
THRUST_COUNT = 5
DEPTH_COUNT = 3
CODE_COUNT = HEADING_COUNT * THRUST_COUNT * DEPTH_COUNT  # 240

HEADING_STEP_DEG = 360.0 / HEADING_COUNT  # 22.5

# thrust_state index values
THRUST_BACK = 0
THRUST_SLOW_BACK = 1
THRUST_STOP = 2
THRUST_SLOW_FORWARD = 3
THRUST_FORWARD = 4

# depth_inc index values (z is positive down: "lower" sinks, "raise" surfaces)
DEPTH_LOWER = 0
DEPTH_HOLD = 1
DEPTH_RAISE = 2


class InvalidCommandError(ValueError):
    """A command field is outside its quantized range."""


class InvalidByteError(ValueError):
    """A received byte is outside the 0..239 command codebook."""


@dataclass(frozen=True, slots=True)
class Command:
    """Quantized operator intent: one of the 240 encodable desired states."""

    heading_idx: int
    thrust_state: int
    depth_inc: int

    def validate(self) -> "Command":
        if not (isinstance(self.heading_idx, int) and 0 <= self.heading_idx < HEADING_COUNT):
            raise InvalidCommandError(f"heading_idx {self.heading_idx!r} not in 0..15")
        if not (isinstance(self.thrust_state, int) and 0 <= self.thrust_state < THRUST_COUNT):
            raise InvalidCommandError(f"thrust_state {self.thrust_state!r} not in 0..4")
        if not (isinstance(self.depth_inc, int) and 0 <= self.depth_inc < DEPTH_COUNT):
            raise InvalidCommandError(f"depth_inc {self.depth_inc!r} not in 0..2")
        return self


def encode(cmd: Command) -> int:
    """Pack a command into its byte code (0..239)."""
    cmd.validate()
    return cmd.heading_idx * (THRUST_COUNT * DEPTH_COUNT) + cmd.thrust_state * DEPTH_COUNT + cmd.depth_inc


def decode(byte: int) -> Command:
    """Unpack a byte code back into a command; 240..255 raise InvalidByteError."""
    if not (isinstance(byte, int) and 0 <= byte <= 255):
        raise InvalidByteError(f"not a byte value: {byte!r}")
    if byte >= CODE_COUNT:
        raise InvalidByteError(f"byte {byte} is in the reserved range 240..255")
    heading_idx, rest = divmod(byte, THRUST_COUNT * DEPTH_COUNT)
    thrust_state, depth_inc = divmod(rest, DEPTH_COUNT)
    return Command(heading_idx, thrust_state, depth_inc)


def heading_of(idx: int) -> float:
    """Heading angle in degrees [0, 360) for a cardinal index (0 = North, CW)."""
    if not (isinstance(idx, int) and 0 <= idx < HEADING_COUNT):
        raise InvalidCommandError(f"heading index {idx!r} not in 0..15")
    return idx * HEADING_STEP_DEG


def nearest_heading_idx(angle_rad: float) -> int:
    """Cardinal index whose sector contains the given compass angle (radians)."""
    step = math.radians(HEADING_STEP_DEG)
    return int(round(angle_rad / step)) % HEADING_COUNT
