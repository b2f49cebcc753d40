"""Angle helpers shared by the controllers, pilot and gate geometry."""

import math

TWO_PI = 2.0 * math.pi


def wrap_2pi(angle: float) -> float:
    """Wrap an angle to [0, 2*pi)."""
    a = math.fmod(angle, TWO_PI)
    if a < 0.0:
        a += TWO_PI
    return a


def wrap_pi(angle: float) -> float:
    """Wrap an angle difference to (-pi, pi] (shortest rotation)."""
    a = math.fmod(angle + math.pi, TWO_PI)
    if a <= 0.0:
        a += TWO_PI
    return a - math.pi


def bearing(dx: float, dy: float) -> float:
    """Compass bearing of the displacement (dx east, dy north), in [0, 2*pi).

    0 points along +y, pi/2 along +x (clockwise-positive compass convention).
    """
    return wrap_2pi(math.atan2(dx, dy))
