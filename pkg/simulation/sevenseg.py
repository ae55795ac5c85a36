"""BCD to seven-segment encoder for the distance display."""

import math
from collections.abc import Callable
from typing import NamedTuple


class SegmentPattern(NamedTuple):
    """Segment levels a..g (1 = lit); a is the top bar, g the middle bar."""

    a: int
    b: int
    c: int
    d: int
    e: int
    f: int
    g: int

    @property
    def bits(self) -> int:
        """Pattern as a 7-bit value, segment a in the most significant bit."""
        value = 0
        for level in self:
            value = (value << 1) | level
        return value

    @classmethod
    def from_bits(cls, value: int) -> "SegmentPattern":
        """Build a pattern from a 7-bit value (a..g, MSB first)."""
        return cls(*(int(b) for b in format(value, "07b")))


DIGIT_BITS = (0x7E, 0x30, 0x6D, 0x79, 0x33, 0x5B, 0x5F, 0x70, 0x7F, 0x7B)
BLANK = SegmentPattern(0, 0, 0, 0, 0, 0, 0)
_PATTERNS = tuple(SegmentPattern.from_bits(bits) for bits in DIGIT_BITS)


def encode_bcd(nibble: int) -> SegmentPattern:
    """
    Encode a BCD nibble for a common-cathode display.

    Args:
        nibble: Value in [0, 15].

    Returns:
        Standard digit pattern for 0-9, blank for 10-15.

    Raises:
        ValueError: If the nibble is outside [0, 15].
    """
    if not 0 <= nibble <= 15:
        raise ValueError(f"nibble must be in [0, 15], got {nibble}")
    if nibble > 9:
        return BLANK
    return _PATTERNS[nibble]


def display_digit(distance: float) -> int:
    """Return the tens digit of a distance in cm, saturated at 9."""
    if distance < 0:
        raise ValueError(f"distance must be >= 0, got {distance}")
    return min(9, math.floor(distance / 10))


class SevenSegmentDisplay:
    """Clocked display block showing the tens digit of the measured distance."""

    name = "display"

    def __init__(self, distance_source: Callable[[], float]) -> None:
        """
        Initialize the display showing 0, the digit of the reset distance register.

        Args:
            distance_source: Callable returning the measured distance in cm.
        """
        self.distance_source = distance_source
        self.digit = 0
        self.pattern = encode_bcd(0)

    def step(self, tick: int) -> None:  # noqa: ARG002
        """Execute one tick."""
        self.digit = display_digit(self.distance_source())
        self.pattern = encode_bcd(self.digit)

    def horizon(self, tick: int) -> int | None:  # noqa: ARG002
        """The display never needs single stepping."""
        return None

    def skip(self, tick: int, count: int) -> None:  # noqa: ARG002
        """Advance ``count`` ticks."""
        self.step(tick)
