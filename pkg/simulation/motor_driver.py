"""L293D quadruple half-H driver model: drive commands to pins and back."""

from collections.abc import Callable
from dataclasses import dataclass, fields
from enum import Enum
from typing import NamedTuple

from simulation.pwm import PwmGenerator


class DriveCommand(Enum):
    """Symbolic motion commands of the controller."""

    FORWARD = "Forward"
    REVERSE = "Reverse"
    LEFT = "Left"
    RIGHT = "Right"
    STOP = "Stop"


@dataclass(frozen=True, slots=True)
class L293Pins:
    """Logic inputs of the L293D, in the order ENA ENB 1A 2A 3A 4A."""

    ena: int = 0
    enb: int = 0
    a1: int = 0
    a2: int = 0
    a3: int = 0
    a4: int = 0

    def __post_init__(self) -> None:
        """Validate pin levels.

        Raises:
            ValueError: If any pin is not 0 or 1.
        """
        for pin in fields(self):
            if getattr(self, pin.name) not in (0, 1):
                raise ValueError(f"{pin.name} must be 0 or 1")

    @property
    def bits(self) -> str:
        """Pin levels as a string, e.g. '111010' for Forward."""
        return "".join(str(getattr(self, pin.name)) for pin in fields(self))

    @classmethod
    def from_bits(cls, bits: str) -> "L293Pins":
        """Build pins from a six-character '0'/'1' string."""
        if len(bits) != 6:
            raise ValueError(f"expected 6 pin levels, got '{bits}'")
        return cls(*(int(b) for b in bits))

    @classmethod
    def from_index(cls, index: int) -> "L293Pins":
        """Build pins from a 6-bit integer, ENA being the most significant bit."""
        return cls.from_bits(format(index, "06b"))


class WheelDrive(NamedTuple):
    """Signed drive of each wheel: +1 forward, -1 backward, 0 undriven."""

    left: int
    right: int


LOGIC_TABLE: dict[DriveCommand, L293Pins] = {
    DriveCommand.FORWARD: L293Pins.from_bits("111010"),
    DriveCommand.REVERSE: L293Pins.from_bits("110101"),
    DriveCommand.LEFT: L293Pins.from_bits("010010"),
    DriveCommand.RIGHT: L293Pins.from_bits("101000"),
    DriveCommand.STOP: L293Pins(),
}


def encode(cmd: DriveCommand) -> L293Pins:
    """
    Return the L293D input pattern for a drive command.

    Args:
        cmd: Symbolic command.

    Returns:
        The logic-table row for the command; Stop drives every pin low.
    """
    return LOGIC_TABLE[cmd]


def _half_bridge(enable: int, in_a: int, in_b: int) -> int:
    # entradas iguais: roda livre (sem frenagem)
    if not enable or in_a == in_b:
        return 0
    return 1 if in_a else -1


def decode(pins: L293Pins, pwm_level: int) -> WheelDrive:
    """
    Decode pin levels into the drive each wheel receives.

    Both enables are gated by the PWM output. Channel A (1A, 2A) drives the
    left wheel, channel B (3A, 4A) the right wheel.

    Args:
        pins: L293D inputs.
        pwm_level: Current PWM output level.

    Returns:
        Signed per-wheel drive.
    """
    return WheelDrive(
        left=_half_bridge(pins.ena & pwm_level, pins.a1, pins.a2),
        right=_half_bridge(pins.enb & pwm_level, pins.a3, pins.a4),
    )


class MotorDriverUnit:
    """
    Clocked L293D stage between the controller and the plant.

    Accumulates the decoded drive of each wheel over the current plant step
    so the plant receives the averaged, signed duty fraction.
    """

    name = "motor-driver"

    def __init__(
        self, command_source: Callable[[], DriveCommand], pwm: PwmGenerator
    ) -> None:
        """
        Initialize the stage with all pins low.

        Args:
            command_source: Callable returning the held drive command.
            pwm: PWM generator whose output gates the enables.
        """
        self.command_source = command_source
        self.pwm = pwm
        self.pins = L293Pins()
        self.drive = WheelDrive(0, 0)
        self.left_sum = 0
        self.right_sum = 0

    def step(self, tick: int) -> None:  # noqa: ARG002
        """Execute one tick."""
        self.pins = encode(self.command_source())
        self.drive = decode(self.pins, self.pwm.state.output)
        self.left_sum += self.drive.left
        self.right_sum += self.drive.right

    def horizon(self, tick: int) -> int | None:  # noqa: ARG002
        """The driver never needs single stepping."""
        return None

    def skip(self, tick: int, count: int) -> None:  # noqa: ARG002
        """Accumulate ``count`` ticks using the PWM high count of the span."""
        self.pins = encode(self.command_source())
        full = decode(self.pins, 1)
        self.left_sum += full.left * self.pwm.span_high
        self.right_sum += full.right * self.pwm.span_high
        self.drive = decode(self.pins, self.pwm.state.output)

    def take_sums(self) -> tuple[int, int]:
        """Return and reset the accumulated drive of the plant step."""
        sums = (self.left_sum, self.right_sum)
        self.left_sum = 0
        self.right_sum = 0
        return sums
