"""Distance-to-speed control law of the robot."""

import math
from dataclasses import dataclass

from simulation.errors import ConfigurationError
from simulation.motor_driver import DriveCommand
from simulation.pwm import DutyCycle


@dataclass(frozen=True)
class ControlParams:
    """
    Thresholds of the piecewise-linear speed law.

    Attributes:
        d_stop: At or below this distance (cm) the robot stops.
        d_far: At or beyond this distance (cm) the robot runs at duty_max.
        duty_max: Duty used at full speed.
        turn_on_stop: Turn left instead of stopping inside the stop band.
    """

    d_stop: float = 15.0
    d_far: float = 60.0
    duty_max: int = 255
    turn_on_stop: bool = False

    def __post_init__(self) -> None:
        """Validate the thresholds.

        Raises:
            ConfigurationError: If 0 < d_stop < d_far does not hold or
                duty_max is outside [0, 255].
        """
        if not self.d_stop > 0:
            raise ConfigurationError(f"d_stop must be positive, got {self.d_stop}")
        if not self.d_stop < self.d_far:
            raise ConfigurationError(
                f"d_stop must be smaller than d_far ({self.d_stop} >= {self.d_far})"
            )
        if not 0 <= self.duty_max <= 255:
            raise ConfigurationError(
                f"duty_max must be in [0, 255], got {self.duty_max}"
            )


def control_law(
    distance: float, params: ControlParams
) -> tuple[DriveCommand, DutyCycle]:
    """
    Map a measured distance to a drive command and a duty cycle.

    Args:
        distance: Measured distance to the obstacle, cm.
        params: Control thresholds.

    Returns:
        (Stop, 0) inside the stop band (or (Left, duty_max) with
        turn_on_stop), (Forward, duty_max) beyond d_far, and a duty
        interpolated linearly in between, rounded half up.

    Raises:
        ValueError: If the distance is negative.
    """
    if distance < 0:
        raise ValueError(f"distance must be >= 0, got {distance}")
    if distance <= params.d_stop:
        if params.turn_on_stop:
            return DriveCommand.LEFT, DutyCycle(params.duty_max)
        return DriveCommand.STOP, DutyCycle(0)
    if distance >= params.d_far:
        return DriveCommand.FORWARD, DutyCycle(params.duty_max)
    ratio = (distance - params.d_stop) / (params.d_far - params.d_stop)
    return DriveCommand.FORWARD, DutyCycle(math.floor(params.duty_max * ratio + 0.5))
