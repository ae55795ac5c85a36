"""8-bit counter-comparator PWM generator driving the L293D enable pins."""

from collections.abc import Callable
from dataclasses import dataclass
from fractions import Fraction

PWM_PERIOD = 256


@dataclass(frozen=True, slots=True)
class DutyCycle:
    """Compare threshold against the free-running 8-bit counter."""

    value: int = 0

    def __post_init__(self) -> None:
        """Validate the duty range.

        Raises:
            ValueError: If the value is outside [0, 255].
        """
        if not 0 <= self.value <= PWM_PERIOD - 1:
            raise ValueError(f"duty must be in [0, 255], got {self.value}")


@dataclass(frozen=True, slots=True)
class PwmState:
    """Counter and output pin of the generator (reset: counter 0, output low)."""

    counter: int = 0
    output: int = 0


def _threshold(duty: DutyCycle, saturate: bool) -> int:
    if saturate and duty.value == PWM_PERIOD - 1:
        return PWM_PERIOD
    return duty.value


def pwm_step(state: PwmState, duty: DutyCycle, saturate: bool = False) -> PwmState:
    """
    Advance the generator by one controller tick.

    Args:
        state: Current counter and output.
        duty: Compare value, sampled on every tick.
        saturate: When True, duty 255 keeps the output permanently high.

    Returns:
        New state with the counter incremented modulo 256 and
        output = 1 iff the new counter is below the duty.
    """
    counter = (state.counter + 1) % PWM_PERIOD
    return PwmState(counter=counter, output=int(counter < _threshold(duty, saturate)))


def high_ticks(counter: int, ticks: int, threshold: int) -> int:
    """
    Count high outputs over the next ``ticks`` steps starting from ``counter``.

    Closed form of repeatedly applying ``pwm_step`` with a constant duty.
    """

    def below(x: int) -> int:
        # valores m em [0, x] com m % 256 < threshold
        return (x // PWM_PERIOD) * threshold + min(x % PWM_PERIOD + 1, threshold)

    return below(counter + ticks) - below(counter)


def duty_fraction(duty: DutyCycle, saturate: bool = True) -> Fraction:
    """
    Return the fraction of a PWM period the output is high.

    Args:
        duty: Compare value.
        saturate: Apply the full-on rule for duty 255.

    Returns:
        duty/256 as an exact fraction, or 1 for duty 255 with saturation.
    """
    return Fraction(_threshold(duty, saturate), PWM_PERIOD)


class PwmGenerator:
    """
    Clocked PWM block.

    Reads its duty from ``duty_source`` every tick, as the hardware samples
    the duty register without latching it at the period boundary.
    """

    name = "pwm"

    def __init__(self, duty_source: Callable[[], int], saturate: bool = True) -> None:
        """
        Initialize the generator in its reset state.

        Args:
            duty_source: Callable returning the current duty register value.
            saturate: Full-on rule for duty 255.
        """
        self.duty_source = duty_source
        self.saturate = saturate
        self.state = PwmState()
        self.span_high = 0

    def step(self, tick: int) -> None:  # noqa: ARG002
        """Execute one tick."""
        self.state = pwm_step(self.state, DutyCycle(self.duty_source()), self.saturate)
        self.span_high = self.state.output

    def horizon(self, tick: int) -> int | None:  # noqa: ARG002
        """The generator never needs single stepping."""
        return None

    def skip(self, tick: int, count: int) -> None:  # noqa: ARG002
        """Advance ``count`` ticks with the current duty held constant."""
        threshold = _threshold(DutyCycle(self.duty_source()), self.saturate)
        self.span_high = high_ticks(self.state.counter, count, threshold)
        counter = (self.state.counter + count) % PWM_PERIOD
        self.state = PwmState(counter=counter, output=int(counter < threshold))
